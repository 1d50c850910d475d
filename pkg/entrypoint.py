from asyncio import run
from os import getenv
from pathlib import Path
from sys import argv, exit

from core.log import configure
from core.workbench import CACHE_ENV, DEFAULT_CACHE_DIR, Workbench


def pop_option(arguments: list[str], name: str, default: str) -> str:
    """Removes "--name value" or "--name=value" from the argument list and returns the value."""
    for index, token in enumerate(arguments):
        if token == f"--{name}" and index + 1 < len(arguments):
            value = arguments[index + 1]
            del arguments[index:index + 2]
            return value
        if token.startswith(f"--{name}="):
            del arguments[index]
            return token.split("=", 1)[1]
    return default


if __name__ == "__main__":
    arguments = argv[1:]
    configure(pop_option(arguments, "log-level", "INFO").upper())
    workers = int(pop_option(arguments, "workers", "1"))

    workbench = Workbench(cache_dir = Path(getenv(CACHE_ENV, DEFAULT_CACHE_DIR)), workers = workers)
    response = run(workbench.dispatch(arguments))
    print(response.model_dump_json(indent = 2))
    exit(Workbench.exit_code(response))
