from motifcloss.cli import main
import sys

sys.exit(main())
