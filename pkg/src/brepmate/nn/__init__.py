from . import autodiff
from .autodiff import Value
from .optim import adam_step
from .params import ParamStore, load_checkpoint, save_checkpoint

__all__ = ["autodiff", "Value", "adam_step", "ParamStore", "load_checkpoint", "save_checkpoint"]
