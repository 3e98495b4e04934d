import sys

from hypothesis import settings

settings.register_profile("repo", deadline=None)
settings.load_profile("repo")


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.LINES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(mod.LINES):
        terminalreporter.write_line(mod.LINES[number])
