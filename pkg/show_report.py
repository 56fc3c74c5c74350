#!/usr/bin/env python3
import argparse

from report import load_report


def show_report(path: str, limit: int = 20):
    report = load_report(path)
    summary = report.summary
    print(f"Report {path} (schema {report.schema_version}, command '{report.command}')")
    print(f"Checks: {summary.total}  passed: {summary.passed}  failed: {summary.failed}")

    for section, records in report.sections.items():
        passed = sum(r.passed for r in records)
        print(f"  {section}: {passed}/{len(records)}")

    failures = report.failures()
    for record in failures[:limit]:
        shown = record.exact if record.exact is not None else record.value
        print(f"\nFAILED {record.name} [{record.scheme}]")
        print(f"  value: {shown}  expected: {record.expected}")
        if record.tolerance is not None:
            print(f"  tolerance: {record.tolerance}")
        if record.note:
            print(f"  note: {record.note}")
    if len(failures) > limit:
        print(f"\n... and {len(failures) - limit} more")
    return summary.failed == 0


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description="Summarize a vacuum workbench report")
    parser.add_argument("report", nargs="?", default="reports/report.json", help="Report JSON path")
    parser.add_argument("--limit", type=int, default=20, help="Failed checks to show")
    args = parser.parse_args()
    try:
        show_report(args.report, args.limit)
    except Exception as e:
        print(f"Error: {e}")
        print("Report may not exist yet")
