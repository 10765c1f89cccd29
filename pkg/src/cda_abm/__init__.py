from cda_abm.registry import registry

strategy = registry.strategy
observer = registry.observer

__version__ = "0.1.0"
