"""
Main Entry Point
Runs the command line application: python -m src.main verify-all
"""
from src.cli import app


def main() -> None:
    app(prog_name="splitting-toolkit")


if __name__ == "__main__":
    main()
