from .main import main

raise SystemExit(main("python3 -m hyperwitten"))
