#!/usr/bin/env python3
"""
Setup verification script for the Dirac counterexample verifier
Run this to verify all dependencies are installed and the package imports
"""

import os
import sys

PROJECT_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, PROJECT_ROOT)


def check_python_imports():
    """Check that every required Python package can be imported"""
    print("🐍 Testing Python imports...")

    packages = [
        ('numpy', 'Arrays and linear algebra'),
        ('scipy', 'Quadrature, optimization and logsumexp'),
        ('mpmath', 'Arbitrary-precision reference values'),
        ('pandas', 'CSV output'),
        ('aiofiles', 'Async history and metrics files'),
        ('psutil', 'Process memory snapshots'),
        ('pytest', 'Testing framework'),
        ('hypothesis', 'Property-based tests'),
    ]

    failed_imports = []

    for package, description in packages:
        try:
            __import__(package)
            print(f"✅ {package} imported successfully ({description})")
        except ImportError as e:
            print(f"❌ Failed to import {package}: {e}")
            failed_imports.append(package)

    if failed_imports:
        print("\n📝 Missing packages. Install with:")
        print(f"   pip install {' '.join(failed_imports)}")
        print("   or run: pip install -r requirements.txt")

    return len(failed_imports) == 0


def check_directory_structure():
    """Check that the source, test and config directories exist"""
    print("📁 Testing directory structure...")

    required_dirs = [
        ('src/verifier', 'Verifier package'),
        ('src/verifier/tools', 'Run history and metrics'),
        ('src/tests', 'Test files'),
        ('config', 'Verification configuration'),
        ('setup', 'Setup and verification scripts'),
    ]

    missing_dirs = []
    for dir_path, description in required_dirs:
        if os.path.isdir(os.path.join(PROJECT_ROOT, dir_path)):
            print(f"✅ {dir_path} exists ({description})")
        else:
            print(f"❌ {dir_path} is missing ({description})")
            missing_dirs.append(dir_path)

    return len(missing_dirs) == 0


def check_config_files():
    """Check that the configuration files exist"""
    print("\n📄 Testing configuration files...")

    config_files = [
        ('requirements.txt', 'Python dependencies'),
        ('config/verification_config.json', 'Run configuration'),
        ('config/verification_config.template.json', 'Configuration template'),
    ]

    missing_files = []
    for file_name, description in config_files:
        if os.path.exists(os.path.join(PROJECT_ROOT, file_name)):
            print(f"✅ {file_name} exists ({description})")
        else:
            print(f"❌ {file_name} is missing ({description})")
            missing_files.append(file_name)

    return len(missing_files) == 0


def run_quick_build():
    """Build the default configuration once; delta and k0 have known values"""
    print("\n🧮 Building the default configuration...")

    try:
        from src.verifier.spinor_fields import build_counterexample
    except ImportError as e:
        print(f"❌ Verifier package not importable: {e}")
        return False

    cfg = build_counterexample(0.1)
    if cfg.k0 == 8 and abs(cfg.delta - 0.0906919) < 1e-6:
        print(f"✅ delta={cfg.delta:.7f}, k0={cfg.k0}")
        return True
    print(f"❌ Unexpected configuration: delta={cfg.delta!r}, k0={cfg.k0}")
    return False


if __name__ == "__main__":
    print("🚀 Dirac counterexample verifier - Setup Verification")
    print("=" * 50)

    checks = [
        ("Directory Structure", check_directory_structure),
        ("Configuration Files", check_config_files),
        ("Python Imports", check_python_imports),
        ("Quick Build", run_quick_build),
    ]

    checks_passed = 0
    for check_name, check_func in checks:
        print(f"\n{check_name}:")
        if check_func():
            checks_passed += 1
        print("-" * 30)

    print(f"\n📊 Final Results: {checks_passed}/{len(checks)} checks passed")

    if checks_passed == len(checks):
        print("🎉 Setup verification complete! Run: python run_verification.py check")
        sys.exit(0)
    else:
        print("⚠️  Some issues found. Please resolve them before continuing.")
        print("\n🔧 Common fixes:")
        print("   - Run: pip install -r requirements.txt")
        print("   - Copy config/verification_config.template.json to config/verification_config.json")
        print("   - Run the script from a checkout that includes src/ and config/")
        sys.exit(1)
