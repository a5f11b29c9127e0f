"""From-scratch numpy classifiers for genus and membership tasks."""
from .layers import LayerSpec
from .metrics import CVResult, Metrics, kfold_cv, mcc
from .network import Network, TrainParams, image_cnn, mlp, train
from .weights import WeightRecord, export_weights, heaviside_genus

__all__ = [
    "CVResult",
    "LayerSpec",
    "Metrics",
    "Network",
    "TrainParams",
    "WeightRecord",
    "export_weights",
    "heaviside_genus",
    "image_cnn",
    "kfold_cv",
    "mcc",
    "mlp",
    "train",
]
