from .main import app


def cli():
    """Execute the CLI for pysptags."""
    app(prog_name="pysptags")
