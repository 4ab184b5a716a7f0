# -*- coding: iso-8859-1 -*-
'''Imports all important pointkan modules'''
__all__ = ['options', 'main', 'display', 'run_pointkan', 'init',
           'JacobiParams', 'eval_basis', 'Value', 'grad_check',
           'KanLayer', 'MlpLayer', 'BatchNorm', 'param_count',
           'ModelConfig', 'build_model', 'forward', 'flops_estimate',
           'PointCloud', 'TriangleMesh', 'Dataset',
           'read', 'main_read', 'main_output',
           'TrainConfig', 'train', 'adam_step', 'lr_at',
           'evaluate_cls', 'evaluate_iou', 'robustness_sweep', 'ablation',
           ]

__version__ = '0.1.0'

# Import high-level modules
from . import options, display, main

from .jacobi import JacobiParams, eval_basis
from .autodiff import Value, grad_check
from .layers import KanLayer, MlpLayer, BatchNorm, param_count
from .models import ModelConfig, build_model, forward, flops_estimate
from .pointcloud import PointCloud, TriangleMesh, Dataset
from .main import run_pointkan, init
from .output.high_level import main_output
from .read import main_read
from .train import TrainConfig, train, adam_step, lr_at
from .metrics import evaluate_cls, evaluate_iou
from .experiments import robustness_sweep, ablation
