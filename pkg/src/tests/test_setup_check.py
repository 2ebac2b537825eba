"""
The setup verification script should pass in the environment the tests run in.
"""

import os
import sys

sys.path.append(os.path.join(os.path.dirname(__file__), '..', '..'))

from setup.verify_setup import check_config_files, check_directory_structure, check_python_imports, run_quick_build


def test_setup_checks_pass(capsys):
    assert check_directory_structure()
    assert check_config_files()
    assert check_python_imports()
    assert run_quick_build()
    assert "❌" not in capsys.readouterr().out
