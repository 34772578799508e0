#!/usr/bin/env python3
"""
Byte-compile every module of the package and its tests without importing them.
"""

import os
import py_compile
import sys

TARGETS = ("inclab", "tests")


def check_syntax(directories):
    """Return (files checked, [(path, error)])."""
    errors = []
    checked = 0

    for directory in directories:
        for root, dirs, files in os.walk(directory):
            dirs[:] = [d for d in dirs if d != '__pycache__']

            for file in sorted(files):
                if not file.endswith('.py'):
                    continue
                filepath = os.path.join(root, file)
                try:
                    py_compile.compile(filepath, doraise=True)
                    checked += 1
                except py_compile.PyCompileError as e:
                    errors.append((filepath, str(e)))
                    print(f"✗ {filepath}: {e}")

    return checked, errors


if __name__ == "__main__":
    checked, errors = check_syntax(sys.argv[1:] or TARGETS)
    print(f"checked {checked} files")

    if errors:
        print(f"{len(errors)} files failed to compile:")
        for filepath, error in errors:
            print(f"  - {filepath}")
        sys.exit(1)
    sys.exit(0)
