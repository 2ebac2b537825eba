"""
Run the Dirac counterexample verifier
Simple wrapper around the command-line entry point
"""

import sys
from pathlib import Path

# Add the repository root to sys.path so we can import our modules
sys.path.insert(0, str(Path(__file__).parent))

try:
    from src.verifier import __version__
    from src.verifier.cli import main as cli_main
except ImportError as e:
    print(f"❌ Error importing the verifier: {e}", file=sys.stderr)
    print("Install the dependencies with: pip install -r requirements.txt", file=sys.stderr)
    sys.exit(1)


def main():
    argv = sys.argv[1:] or ["check"]
    if "--quiet" not in argv:
        print(f"🧮 Dirac counterexample verifier v{__version__}", file=sys.stderr)
        print("=" * 50, file=sys.stderr)
    try:
        return cli_main(argv)
    except KeyboardInterrupt:
        print("\n🛑 Interrupted", file=sys.stderr)
        return 130


if __name__ == "__main__":
    sys.exit(main())
