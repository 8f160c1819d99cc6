import matplotlib.pyplot as plt
import numpy as np

from ..generic.unit_check import DimensionError


def plot_embedding(coords, labels, ax=None, title=None, cmap='tab10'):
    """ scatter plot of a planar projection, colored by class

    Parameters
    ----------
    coords : numpy.ndarray, size=(m,2)
        projected embeddings, e.g.: from `pca2d`
    labels : numpy.ndarray, size=(m,), dtype=int
        class of every sample
    ax : matplotlib.axes.Axes
        axes to draw in, a new figure is made when None
    title : string
    cmap : string
        name of the colormap to be used

    Returns
    -------
    ax : matplotlib.axes.Axes
    """
    coords, labels = np.asarray(coords), np.asarray(labels)
    if coords.ndim != 2 or coords.shape[1] != 2 or \
            labels.shape != (coords.shape[0], ):
        raise DimensionError('please provide (m,2) coordinates and m labels')
    if ax is None:
        fig, ax = plt.subplots()

    col_map = plt.get_cmap(cmap)
    for k in np.unique(labels):
        IN = labels == k
        ax.scatter(coords[IN, 0], coords[IN, 1], s=6, alpha=.7,
                   color=col_map(k % col_map.N), label=str(k))
    ax.set_aspect('equal', adjustable='datalim')
    ax.set_xlabel('first component')
    ax.set_ylabel('second component')
    ax.legend(title='class', fontsize='small', markerscale=2)
    if title is not None:
        ax.set_title(title)
    return ax


def make_embedding_figure(coords, labels, outputname, dpi=150, title=None):
    """ plot a projection and export the figure

    Parameters
    ----------
    coords, labels :
        as in `plot_embedding`
    outputname : string
        name of the output file, its extension sets the format
    dpi : integer
        dots per inch, that is the resolution of the figure
    """
    fig, ax = plt.subplots(figsize=(5, 5))
    plot_embedding(coords, labels, ax=ax, title=title)
    fig.savefig(outputname, dpi=dpi, bbox_inches='tight')
    plt.close(fig)
    return
