from typing import Dict, Any

class Registry:
    def __init__(self):
        self._strategies: Dict[str, Any] = {}
        self._observers: Dict[str, Any] = {}

    def strategy(self, name: str):
        def wrapper(cls_or_func):
            self._strategies[name] = cls_or_func
            return cls_or_func
        return wrapper

    def observer(self, name: str):
        def wrapper(cls_or_func):
            self._observers[name] = cls_or_func
            return cls_or_func
        return wrapper

    def get_strategy(self, name: str):
        return self._strategies.get(name)

    def get_observer(self, name: str):
        return self._observers.get(name)

    def list_all(self) -> Dict[str, Dict[str, Any]]:
        return {
            "strategy": self._strategies,
            "observer": self._observers,
        }

# Global registry instance
registry = Registry()
