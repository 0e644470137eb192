import sys
from pathlib import Path

# Make sibling helper modules (fig6_reference) importable from any cwd.
sys.path.insert(0, str(Path(__file__).parent))
