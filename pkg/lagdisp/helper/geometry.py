import numpy as np

from lagdisp.helper.exceptions import InputError


class PolarPoints:
    """
    Set of points in R^3 given in polar form (r, theta, phi)

    theta is the azimuthal angle and phi the polar angle measured from
    the positive z axis. The three arrays are broadcast to a common
    shape on construction.

    Attributes
    ----------
    r : numpy array
        Radii, non-negative

    theta : numpy array
        Azimuthal angles

    phi : numpy array
        Polar angles in [0, pi]
    """

    def __init__(self, r, theta=0.0, phi=0.0):
        r, theta, phi = np.broadcast_arrays(np.asarray(r, dtype=float),
                                            np.asarray(theta, dtype=float),
                                            np.asarray(phi, dtype=float))
        if np.any(~np.isfinite(r)) or np.any(r < 0):
            raise InputError("Radii of polar points must be finite and "
                             + "non-negative.")
        if np.any(~np.isfinite(theta)) or np.any(~np.isfinite(phi)):
            raise InputError("Angles of polar points must be finite.")

        self.r = r
        self.theta = theta
        self.phi = phi

    @classmethod
    def from_cartesian(cls, xyz):
        """Creates points from an array with a trailing axis of length 3"""
        xyz = np.asarray(xyz, dtype=float)
        if xyz.shape[-1] != 3:
            raise InputError("Cartesian points need a trailing axis of "
                             + "length 3.")
        r = np.linalg.norm(xyz, axis=-1)
        theta = np.mod(np.arctan2(xyz[..., 1], xyz[..., 0]), 2*np.pi)
        cos_phi = np.divide(xyz[..., 2], r, out=np.ones_like(r),
                            where=r > 0)
        phi = np.arccos(np.clip(cos_phi, -1.0, 1.0))
        return cls(r, theta, phi)

    @property
    def shape(self):
        return self.r.shape

    def __len__(self):
        return self.r.size

    def unit_vectors(self):
        """Direction vectors, shape + (3,)"""
        sin_phi = np.sin(self.phi)
        return np.stack([sin_phi*np.cos(self.theta),
                         sin_phi*np.sin(self.theta),
                         np.cos(self.phi)], axis=-1)

    def to_cartesian(self):
        return self.r[..., None]*self.unit_vectors()

    def cos_angle(self, other):
        """Cosine of the angle between the directions of two point sets"""
        u = np.sum(self.unit_vectors()*other.unit_vectors(), axis=-1)
        return np.clip(u, -1.0, 1.0)

    def dot(self, other):
        """Euclidean inner products x . y"""
        return self.r*other.r*self.cos_angle(other)

    def distance_squared(self, other):
        """|x - y|^2 computed from radii and the angle between them"""
        value = self.r**2 + other.r**2 - 2*self.dot(other)
        return np.maximum(value, 0.0)

    def flatten(self):
        return PolarPoints(self.r.ravel(), self.theta.ravel(),
                           self.phi.ravel())

    def __getitem__(self, index):
        return PolarPoints(self.r[index], self.theta[index],
                           self.phi[index])

    def __repr__(self):
        return "PolarPoints(shape=" + str(self.shape) + ")"


def as_points(value):
    """
    Accepts PolarPoints or a (r, theta, phi) tuple and returns PolarPoints

    Only tuples are read as polar triples. Lists and arrays are rejected,
    Cartesian coordinates go through PolarPoints.from_cartesian.
    """
    if isinstance(value, PolarPoints):
        return value
    if not isinstance(value, tuple):
        raise InputError("Points must be PolarPoints or a (r, theta, phi) "
                         + "tuple, got " + type(value).__name__ + ". Use "
                         + "PolarPoints.from_cartesian for Cartesian "
                         + "coordinates.")
    if len(value) != 3:
        raise InputError("Points must be PolarPoints or a "
                         + "(r, theta, phi) tuple.")
    return PolarPoints(*value)
