"""
Allow running as python -m toral_mass
"""
from .cli import main

if __name__ == "__main__":
    main()
