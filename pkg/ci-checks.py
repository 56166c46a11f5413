import subprocess
from os import path

ROOT = path.dirname(path.abspath(__file__))

CHECKS = [
    ("flake8", ["-m", "flake8", "--extend-exclude", ".venv,examples", "--max-line-length=120", "dyndist", "tests"], ROOT),
    ("pyright", ["-m", "pyright", "--project", "pyrightconfig.json", "dyndist"], ROOT),
    ("pydocstyle", ["-m", "pydocstyle", "--add-ignore=D100", "--add-select=D212", "./dyndist"], ROOT),
    ("pytest", ["-m", "pytest", "--cov-config=.coveragerc", "--cov=dyndist/", "tests"], ROOT),
    ("sphinx", ["-m", "sphinx", "-M", "html", "source", "build"], path.join(ROOT, "docs")),
]

results = {}
for name, arguments, directory in CHECKS:
    if name == "sphinx" and results["pytest"] != 0:
        results[name] = None
        continue
    print(f"\n\n*** {name} ***\n")
    results[name] = subprocess.call(["python", *arguments], cwd=directory)

print("\n\nSummary\n=======\n")
for name, code in results.items():
    if code is None:
        print(f"..  {name:<11} Skipped")
    elif code == 0:
        print(f"✔️   {name:<11} Success")
    else:
        print(f"❌  {name:<11} Failed")

passed = sum(1 for code in results.values() if code == 0)
print(f"\n{passed}/{len(CHECKS)} passed.")
print("Ready to push!" if passed == len(CHECKS) else "Work to do...")
