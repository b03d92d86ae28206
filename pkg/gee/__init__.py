from .config import EnsembleConfig, KMeansConfig
from .encoder import normalize, one_hot_embed
from .ensemble import EnsembleResult, fit, fit_single, select_cluster_size
from .graph import class_counts, parse_edgelist, read_labels, write_edgelist, write_embedding, write_labels
from .kmeans import kmeans as kmeans_cluster
from .models import UNASSIGNED, EdgeList, Embedding, LabelVector
from .quality import ari, mri, silhouette
from .simgen import SimSpec, preset, sample

__all__ = [
    'EdgeList', 'Embedding', 'EnsembleConfig', 'EnsembleResult', 'KMeansConfig', 'LabelVector', 'SimSpec',
    'UNASSIGNED', 'ari', 'class_counts', 'fit', 'fit_single', 'kmeans_cluster', 'mri', 'normalize', 'one_hot_embed',
    'parse_edgelist', 'preset', 'read_labels', 'sample', 'select_cluster_size', 'silhouette', 'write_edgelist',
    'write_embedding', 'write_labels',
]
