from . import normal_agents
from . import additional_agents
