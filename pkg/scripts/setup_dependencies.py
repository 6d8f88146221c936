"""
Setup script for horolab
This script installs all required dependencies for the project
"""

import subprocess
import sys

def install_package(package):
    """Install a package using pip"""
    subprocess.check_call([sys.executable, "-m", "pip", "install", package])

dependencies = [
    "numpy>=1.24.0",  # Arrays and small linear algebra
    "scipy>=1.11.0",  # ODE integration, quadrature, root finding
    "sympy>=1.12",  # Exact derivatives of warping expressions
    "matplotlib>=3.7.0",  # Optional SVG plots
    "python-dotenv>=1.0.0",  # Environment variables
    "pytest>=7.4.0",  # Test runner
    "pytest-asyncio>=0.21.0",  # Async runner tests
]

print("Installing dependencies for horolab...")

failed = []
for package in dependencies:
    try:
        print(f"Installing {package}...")
        install_package(package)
        print(f"✓ {package} installed successfully")
    except subprocess.CalledProcessError as e:
        print(f"✗ Failed to install {package}: {e}")
        failed.append(package)

if failed:
    print(f"\n✗ {len(failed)} packages failed to install: {', '.join(failed)}")
    sys.exit(1)

print("\n✓ All dependencies installed successfully!")
print("\nNext steps:")
print("1. Optionally create a .env file to override tolerances or OUTPUT_DIR")
print("2. Run the tests with: pytest")
print("3. Run the acceptance suite with: python main.py verify-all")
