from importlib import import_module

# Subcommand modules, registered in this order
_module_names = [
    "hetalu.tools.analyze",
    "hetalu.tools.simulate",
    "hetalu.tools.compare",
    "hetalu.tools.gen_trace",
    "hetalu.tools.calibrate",
]

TOOL_MODULES = [import_module(_name) for _name in _module_names]
