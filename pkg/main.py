"""
beamwave: beam / Schrödinger duality toolkit

Run with:
    uv run python main.py simulate|verify|bench|packet [options]
"""

import cli.commands as commands

if __name__ == "__main__":
    raise SystemExit(commands.main())
