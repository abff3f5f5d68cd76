from emphi.stages.stagebase import StageBase
from emphi.stages.stagesmanager import StagesManager

__all__ = ["StageBase", "StagesManager"]
