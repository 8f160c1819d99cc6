import numpy as np


class SembedError(Exception):
    """ base class of all errors raised by this library """


class DimensionError(SembedError, ValueError):
    pass


class DomainError(SembedError, ValueError):
    pass


class DegenerateInputError(DomainError):
    pass


class ConsistencyError(SembedError, ValueError):
    pass


class DatasetError(SembedError, ValueError):
    pass


class SpecError(SembedError, ValueError):
    pass


class ClassIndexError(SembedError, IndexError):
    pass


class ParseError(SembedError, ValueError):
    """ a text file could not be parsed

    Parameters
    ----------
    message : string
        what went wrong
    line : integer, {x ∈ ℕ | x ≥ 1}
        line number in the file, counting the header as line 1
    """

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f'line {line}: {message}'
        super().__init__(message)


class DivergedError(SembedError, FloatingPointError):
    """ training produced a non-finite loss

    Parameters
    ----------
    epoch : integer
        epoch in which the loss blew up, counting from zero
    step : integer
        step within that epoch, counting from zero
    """

    def __init__(self, epoch, step, value):
        self.epoch, self.step, self.value = epoch, step, value
        super().__init__(f'training diverged at epoch {epoch}, step {step}: '
                         f'loss is {value}')


def is_finite_array(A):
    return bool(np.all(np.isfinite(A)))


def correct_float_array(A, name='array'):
    """ convert to a float64 array and make sure every entry is finite

    Parameters
    ----------
    A : array_like
        data
    name : string
        how the data is called in the error message

    Returns
    -------
    A : numpy.ndarray, dtype=float64
        finite data
    """
    A = np.asarray(A, dtype=np.float64)
    if A.size == 0:
        raise DomainError(f'{name} is empty')
    if not is_finite_array(A):
        raise DomainError(f'{name} holds non-finite entries')
    return A


def correct_class_index(c, n):
    """ check that a class index (or a vector of them) falls in 0...n-1

    Parameters
    ----------
    c : {integer, numpy.ndarray}
        class index or indices
    n : integer
        number of classes

    Returns
    -------
    c : {integer, numpy.ndarray}, dtype=int
    """
    c_arr = np.asarray(c)
    if not np.issubdtype(c_arr.dtype, np.integer):
        if not np.all(np.mod(c_arr, 1) == 0):
            raise ClassIndexError('class index should be an integer')
        c_arr = c_arr.astype(int)
    if np.any(c_arr < 0) or np.any(c_arr >= n):
        raise ClassIndexError(f'class index {c} out of range for {n} '
                              f'classes')
    if c_arr.ndim == 0:
        return int(c_arr)
    return c_arr


def are_two_arrays_equal(A, B, name='arrays'):
    if A.shape != B.shape:
        raise DimensionError(f'please provide {name} of equal shape, got '
                             f'{A.shape} and {B.shape}')
    return


def correct_trailing_dimension(A, dim, name='array'):
    """ the last axis of an array should have a given length

    Parameters
    ----------
    A : numpy.ndarray, size=(...,k)
        data
    dim : integer
        expected length k
    name : string
        how the data is called in the error message
    """
    if A.ndim == 0 or A.shape[-1] != dim:
        raise DimensionError(f'{name} has shape {A.shape}, expected a last '
                             f'dimension of {dim}')
    return


def correct_positive_parameter(a, name, strict=True):
    """ make a float out of a scalar and check its sign

    Parameters
    ----------
    a : {integer, float}
        parameter
    name : string
        name of the parameter, used in the error message
    strict : bool
        if True zero is not allowed

    Returns
    -------
    a : float
    """
    if type(a) in (np.ndarray, list, tuple):
        if np.size(a) != 1:
            raise SpecError(f'please provide one value for {name}')
        a = np.ravel(a)[0]
    try:
        a = float(a)
    except (TypeError, ValueError):
        raise SpecError(f'{name} should be a number, got {a!r}')
    if not np.isfinite(a):
        raise SpecError(f'{name} should be finite')
    if strict and a <= 0:
        raise SpecError(f'{name} should be positive, got {a}')
    if not strict and a < 0:
        raise SpecError(f'{name} should not be negative, got {a}')
    return a


def correct_positive_integer(a, name, strict=True):
    """ make an integer out of a scalar and check its sign

    Parameters
    ----------
    a : {integer, float, string}
        parameter, a float should have no fractional part
    name : string
        name of the parameter, used in the error message
    strict : bool
        if True zero is not allowed

    Returns
    -------
    a : integer
    """
    if isinstance(a, (bool, np.bool_)):
        raise SpecError(f'{name} should be an integer')
    if isinstance(a, (float, np.floating)):
        if not float(a).is_integer():
            raise SpecError(f'{name} should be an integer, got {a}')
    try:
        a = int(a)
    except (TypeError, ValueError):
        raise SpecError(f'{name} should be an integer, got {a!r}')
    if strict and a < 1:
        raise SpecError(f'{name} should be positive, got {a}')
    if not strict and a < 0:
        raise SpecError(f'{name} should not be negative, got {a}')
    return a
