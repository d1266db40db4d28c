from acceptance_log import LOG


def pytest_terminal_summary(terminalreporter):
    if LOG:
        terminalreporter.section("acceptance criteria")
        for line in LOG:
            terminalreporter.write_line(line)
