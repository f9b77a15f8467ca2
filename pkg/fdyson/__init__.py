"""fdyson: autovalores del movimiento browniano fraccionario matricial"""

__version__ = '0.1.0'


# Fábrica del ejecutor de suites
def create_runner():
    from .harness import SuiteRegistry

    runner = SuiteRegistry()

    # Importar y registrar las suites
    from .suites.simulate import simulate as simulate_suite
    from .suites.noncollide import noncollide as noncollide_suite
    from .suites.variation import variation as variation_suite
    from .suites.selfsim import selfsim as selfsim_suite
    from .suites.gradcheck import gradcheck as gradcheck_suite
    from .suites.itocheck import itocheck as itocheck_suite
    from .suites.density import density as density_suite

    runner.register_suite(simulate_suite)
    runner.register_suite(noncollide_suite)
    runner.register_suite(variation_suite)
    runner.register_suite(selfsim_suite)
    runner.register_suite(gradcheck_suite)
    runner.register_suite(itocheck_suite)
    runner.register_suite(density_suite)

    return runner
