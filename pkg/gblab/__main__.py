from gblab.cli import main

raise SystemExit(main())
