"""Main module."""

from tate_derham.cli import app


def main():
    app(prog_name="tate-dr")


if __name__ == "__main__":
    main()
