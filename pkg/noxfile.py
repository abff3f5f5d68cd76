"""Config file for Nox sessions

`nox -s checks` runs the linters, type checkers and the fast test suite.
`nox -s slow` runs the overfit and controllability tests, which train small
models for tens of seconds each on a laptop CPU.

Environments are reused between runs (`reuse_existing_virtualenvs`), since a
torch install is several GB. Set `DELETE_VENV_ON_EXIT = True` and turn reuse off
if disk space matters more than setup time.
"""

import nox
import pathlib
import shutil

PYTHON_VERSIONS = ["3.12", "3.13"]
TEXTUAL_VERSIONS = [5.3]

##############
# NOX CONFIG #
##############

nox.options.reuse_existing_virtualenvs = True
nox.options.stop_on_first_error = True
DELETE_VENV_ON_EXIT = False

if nox.options.reuse_existing_virtualenvs and DELETE_VENV_ON_EXIT:
    raise ValueError("Set only one of `reuse_existing_virtualenvs` and `DELETE_VENV_ON_EXIT`.")


def _sync(session: nox.Session) -> None:
    session.run_install(
        "uv",
        "sync",
        "--quiet",
        f"--python={session.virtualenv.location}",
        env={"UV_PROJECT_ENVIRONMENT": session.virtualenv.location},
        external=True,
    )


def _cleanup(session: nox.Session) -> None:
    session_path = pathlib.Path(session.virtualenv.location)
    if session_path.exists() and session_path.is_dir() and DELETE_VENV_ON_EXIT:
        shutil.rmtree(session_path)


################
# NOX SESSIONS #
################


@nox.session(venv_backend="uv", python=PYTHON_VERSIONS)
@nox.parametrize("ver", TEXTUAL_VERSIONS)
def checks(session: nox.Session, ver: float) -> None:

    _sync(session)

    # Pin the chat REPL's textual to the latest patch of one minor series.
    major, minor = str(ver).split(".")
    session.run_install("uv", "pip", "install", f"textual>={ver},<{major}.{int(minor) + 1}.0", external=True)

    session.run("ruff", "check", "src", "tests")
    session.run("mypy", "src")
    session.run("basedpyright", "src")
    session.run("pytest", "tests", "-m", "not slow", "-vv")
    _cleanup(session)


@nox.session(venv_backend="uv", python=PYTHON_VERSIONS[0])
def slow(session: nox.Session) -> None:

    _sync(session)
    session.run("pytest", "tests", "-m", "slow", "-vv")
    _cleanup(session)
