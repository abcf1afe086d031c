from tense.cli import main


raise SystemExit(main())
