from sys import argv

from dyndist import ConfigError, EngineConfig, logging, LogLevel, ParseError, Runner


USAGE = """Usage: python dyndist.py [options] --graph=<file> --stream=<file>
       python dyndist.py [options] --config=<scenario.yaml>
       python dyndist.py --mode=complexity [--csv-out=<file>]

    Options:
    -d / --debug: print debug output
    -v / --verbose: print all verbose output
    --config=<file>: scenario file with settings and batches
    --mode=<mode>: apsp (default), apsp-explicit, sssp, undirected, diameter15, diameter-eps, radius, ecc,
                   closeness, exact-diam or complexity
    --epsilon=<x>: approximation parameter (default 0.5)
    --s=<x> / --mu=<x> / --nu=<x>: exponents, balanced for the mode by default
    --seed=<k>: random seed (default 0)
    --prime=<p>: field size (default 2^61 - 1)
    --oracle-check: compare every answer with exact distances
    --csv-out=<file>: write the rows to a CSV file instead of printing them

    Exit codes: 0 ok, 1 bound violation, 2 parse or configuration error"""


if "-v" in argv or "--verbose" in argv:
    logging.level = LogLevel.verbose
elif "-d" in argv or "--debug" in argv:
    logging.level = LogLevel.debug

if len(argv) < 2 or "-h" in argv or "--help" in argv:
    print(USAGE)
    exit()

try:
    config, scenario = EngineConfig.from_argv(argv[1:])
    code = Runner(config, scenario).run()
except (ParseError, ConfigError) as e:
    print(f"Error: {e}")
    code = 2

exit(code)
