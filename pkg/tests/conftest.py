import helpers


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = helpers.CRITERIA_RESULTS
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(helpers.CRITERIA_TITLES):
        title = helpers.CRITERIA_TITLES[number]
        parts = results.get(number)
        if not parts:
            terminalreporter.write_line(
                f"criterion {number} ({title}): NO RESULT (test errored or deselected)")
            continue
        ok = all(p[1] for p in parts)
        status = "PASS" if ok else "FAIL"
        if len(parts) == 1 and not parts[0][0]:
            detail = parts[0][2]
        else:
            detail = "; ".join(
                f"{part}: {'ok' if p_ok else 'FAIL'} ({p_detail})"
                for part, p_ok, p_detail in parts)
        terminalreporter.write_line(f"criterion {number} ({title}): {status} - {detail}")
