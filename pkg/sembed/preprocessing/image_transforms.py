import numpy as np

from ..generic.unit_check import (DimensionError, DomainError,
                                  correct_positive_integer)


def normalize_mean(train, others=()):
    """ subtract the mean of the training samples from every dataset

    Parameters
    ----------
    train : LabeledDataset
        training data, used to compute the mean
    others : list of LabeledDataset
        further datasets (e.g.: testing data) that get the same treatment

    Returns
    -------
    train : LabeledDataset
        centered training data
    others : list of LabeledDataset
        centered with the training mean, not with their own
    mean : numpy.ndarray, size=(d,)
        the subtracted mean, also stored in the `mean` field of every output

    See Also
    --------
    denormalize
    """
    if len(train) == 0:
        raise DomainError('the training set is empty')
    for ds in others:
        if ds.dim != train.dim:
            raise DimensionError(f'features of length {ds.dim} cannot be '
                                 f'centered by a mean of length {train.dim}')
    mean = np.mean(train.features, axis=0)

    def _center(ds):
        return ds.with_features(ds.features - mean, mean=mean.copy())

    return _center(train), [_center(ds) for ds in others], mean


def denormalize(ds):
    """ add the stored mean back """
    if ds.mean is None:
        return ds
    return ds.with_features(ds.features + ds.mean, mean=None)


def get_image_side(ds):
    """ side of the square images in a dataset

    Parameters
    ----------
    ds : LabeledDataset

    Returns
    -------
    side : integer
    """
    if ds.image_shape is not None:
        m, n = ds.image_shape[:2]
        if m == n and len(ds.image_shape) == 2:
            return m
    else:
        side = int(np.round(np.sqrt(ds.dim)))
        if side**2 == ds.dim:
            return side
    raise DimensionError(f'samples of length {ds.dim} are no square images')


def _crop_offsets(side, crop_side):
    crop_side = correct_positive_integer(crop_side, 'crop_side')
    if crop_side > side:
        raise DimensionError(f'a crop of {crop_side} does not fit into an '
                             f'image of {side}')
    return crop_side, side - crop_side + 1


def augment(image, crop_side, rng):
    """ random crop and horizontal mirror of a square image

    Parameters
    ----------
    image : numpy.ndarray, size=(m,m)
        image
    crop_side : integer, {x ∈ ℕ | x ≤ m}
        size of the crop
    rng : numpy.random.Generator
        consumed for the row offset, the column offset and the mirror coin,
        in that order

    Returns
    -------
    crop : numpy.ndarray, size=(crop_side,crop_side)

    Notes
    -----
    Both offsets are uniform over 0...m-crop_side, the mirror is applied with
    a probability of one half.
    """
    image = np.asarray(image, dtype=np.float64)
    if image.ndim != 2 or image.shape[0] != image.shape[1]:
        raise DimensionError('please provide a square image')
    crop_side, n_offsets = _crop_offsets(image.shape[0], crop_side)
    i, j = rng.integers(n_offsets), rng.integers(n_offsets)
    crop = image[i:i + crop_side, j:j + crop_side]
    if rng.random() < .5:
        crop = np.fliplr(crop)
    return crop.copy()


def augment_batch(X, side, crop_side, rng):
    """ `augment` applied to every row of a batch of flattened images

    Parameters
    ----------
    X : numpy.ndarray, size=(k,side*side)
    side : integer
    crop_side : integer

    Returns
    -------
    X_aug : numpy.ndarray, size=(k,crop_side*crop_side)
    """
    images = np.asarray(X).reshape(-1, side, side)
    return np.stack([augment(im, crop_side, rng).ravel() for im in images])


def center_crop(X, side, crop_side):
    """ crop every flattened image of a batch around its center

    Parameters
    ----------
    X : numpy.ndarray, size=(k,side*side)
    side : integer
    crop_side : integer

    Returns
    -------
    X_crop : numpy.ndarray, size=(k,crop_side*crop_side)
    """
    crop_side, n_offsets = _crop_offsets(side, crop_side)
    i = (n_offsets - 1) // 2
    images = np.asarray(X).reshape(-1, side, side)
    crops = images[:, i:i + crop_side, i:i + crop_side]
    return crops.reshape(-1, crop_side**2)


def match_input_size(ds, in_dim):
    """ features of a dataset, center cropped when the network was trained
    on crops of its images

    Parameters
    ----------
    ds : LabeledDataset
    in_dim : integer
        input length of the network

    Returns
    -------
    X : numpy.ndarray, size=(m,in_dim)
    """
    if ds.dim == in_dim or len(ds) == 0:
        return ds.features
    crop_side = int(np.round(np.sqrt(in_dim)))
    if crop_side**2 != in_dim or ds.dim < in_dim:
        raise DimensionError(f'samples of length {ds.dim} do not fit a '
                             f'network input of {in_dim}')
    return center_crop(ds.features, get_image_side(ds), crop_side)
