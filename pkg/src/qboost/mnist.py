"""IDX ingestion, downsampling, amplitude encoding, and digit-task assembly.

The IDX layout is the classic MNIST one: big-endian u32 magic (2051 for
images, 2049 for labels), u32 counts/dims, then raw unsigned bytes.

`generate_synthetic_digits` renders a deterministic stand-in corpus of
digit-like glyphs (classes 0-3) for environments where the real MNIST
files are not on disk; it feeds the exact same IDX pipeline.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .qstate import StateVector
from .seeding import SYNTH, substream

IMAGE_MAGIC = 2051
LABEL_MAGIC = 2049
_MAX_DIM = 2 ** 31 - 1
DATA_SPLIT = 7  # substream purpose code for task assembly


class IdxFormatError(ValueError):
    pass


class BadMagicError(IdxFormatError):
    pass


class TruncatedPayloadError(IdxFormatError):
    pass


class ZeroVectorError(ValueError):
    pass


@dataclass(frozen=True)
class RawImage:
    width: int
    height: int
    pixels: np.ndarray    # uint8, shape (height, width)

    def __post_init__(self):
        px = np.ascontiguousarray(np.asarray(self.pixels, dtype=np.uint8))
        if px.shape != (self.height, self.width):
            raise ValueError(f"pixel grid {px.shape} does not match "
                             f"{self.height}x{self.width}")
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)


def parse_idx(data: bytes):
    """Decode an IDX payload into images (list of RawImage) or labels (array)."""
    if len(data) < 4:
        raise TruncatedPayloadError("payload shorter than the magic number")
    magic = struct.unpack(">I", data[:4])[0]
    if magic == IMAGE_MAGIC:
        if len(data) < 16:
            raise TruncatedPayloadError("image header needs 16 bytes")
        count, rows, cols = struct.unpack(">III", data[4:16])
        if max(count, rows, cols) > _MAX_DIM or rows * cols > _MAX_DIM:
            raise IdxFormatError(f"dimension overflow: {count}x{rows}x{cols}")
        need = 16 + count * rows * cols
        if len(data) < need:
            raise TruncatedPayloadError(
                f"expected {need} bytes for {count} images, got {len(data)}")
        if len(data) > need:
            raise IdxFormatError(f"{len(data) - need} trailing bytes after pixel data")
        pixels = np.frombuffer(data, dtype=np.uint8, offset=16)
        grids = pixels.reshape(count, rows, cols)
        return [RawImage(cols, rows, grid) for grid in grids]
    if magic == LABEL_MAGIC:
        if len(data) < 8:
            raise TruncatedPayloadError("label header needs 8 bytes")
        count = struct.unpack(">I", data[4:8])[0]
        need = 8 + count
        if len(data) < need:
            raise TruncatedPayloadError(
                f"expected {need} bytes for {count} labels, got {len(data)}")
        if len(data) > need:
            raise IdxFormatError(f"{len(data) - need} trailing bytes after label data")
        return np.frombuffer(data, dtype=np.uint8, offset=8).astype(int)
    raise BadMagicError(f"magic 0x{magic:08x} is neither image (0x{IMAGE_MAGIC:08x}) "
                        f"nor label (0x{LABEL_MAGIC:08x})")


def write_idx_images(images) -> bytes:
    if not images:
        raise ValueError("no images to write")
    rows, cols = images[0].height, images[0].width
    out = [struct.pack(">IIII", IMAGE_MAGIC, len(images), rows, cols)]
    for img in images:
        if (img.height, img.width) != (rows, cols):
            raise ValueError("image dimensions differ")
        out.append(img.pixels.tobytes())
    return b"".join(out)


def write_idx_labels(labels) -> bytes:
    arr = np.asarray(labels, dtype=np.uint8)
    return struct.pack(">II", LABEL_MAGIC, len(arr)) + arr.tobytes()


def downsample(img: RawImage, target: tuple[int, int]) -> np.ndarray:
    """Bilinear resample to (width, height); real-valued output in [0, 255].

    Sampling uses the pixel-center convention with the grid clamped at the
    edges, so target == source is an exact identity.
    """
    tw, th = target
    if tw < 1 or th < 1:
        raise ValueError("target dimensions must be positive")
    if tw > img.width or th > img.height:
        raise ValueError("upsampling is not supported")
    src = img.pixels.astype(float)

    def axis_coords(dst, srcn):
        scale = srcn / dst
        coords = (np.arange(dst) + 0.5) * scale - 0.5
        return np.clip(coords, 0.0, srcn - 1.0)

    ys = axis_coords(th, img.height)
    xs = axis_coords(tw, img.width)
    y0 = np.floor(ys).astype(int)
    x0 = np.floor(xs).astype(int)
    y1 = np.minimum(y0 + 1, img.height - 1)
    x1 = np.minimum(x0 + 1, img.width - 1)
    wy = (ys - y0)[:, None]
    wx = (xs - x0)[None, :]
    p00 = src[np.ix_(y0, x0)]
    p01 = src[np.ix_(y0, x1)]
    p10 = src[np.ix_(y1, x0)]
    p11 = src[np.ix_(y1, x1)]
    return ((1 - wy) * (1 - wx) * p00 + (1 - wy) * wx * p01
            + wy * (1 - wx) * p10 + wy * wx * p11)


def amplitude_encode(values, num_qubits: int) -> StateVector:
    """Zero-pad to 2^N, normalize, and use the entries as amplitudes."""
    flat = np.asarray(values, dtype=float).ravel()
    dim = 2 ** num_qubits
    if flat.size > dim:
        raise ValueError(f"{flat.size} values exceed 2^{num_qubits} amplitudes")
    norm = np.linalg.norm(flat)
    if norm == 0.0:
        raise ZeroVectorError("cannot encode the all-zero vector")
    amps = np.zeros(dim, dtype=complex)
    amps[:flat.size] = flat / norm
    return StateVector(num_qubits, amps)


def encode_image(img: RawImage, target: tuple[int, int], num_qubits: int) -> StateVector:
    """Downsample, scale pixels to [0, 1], and amplitude-encode."""
    values = downsample(img, target) / 255.0
    return amplitude_encode(values, num_qubits)


def build_mnist_task(images, labels, classes=(0, 1, 2, 3), target_dims=(8, 8),
                     num_qubits: int = 6, n_train: int = 0, n_test: int = 0,
                     seed: int = 0):
    """Filter to the class set, relabel to 1..D, encode, and split.

    Train and test index sets are disjoint draws from a seeded shuffle of
    the filtered pool. Returns (train, test) lists of (state, label) pairs
    with labels in 1..D following the sorted class order.
    """
    classes = sorted(set(classes))
    class_to_label = {c: i + 1 for i, c in enumerate(classes)}
    labels = np.asarray(labels)
    pool = [i for i in range(len(images)) if int(labels[i]) in class_to_label]
    if n_train + n_test > len(pool):
        raise ValueError(f"need {n_train + n_test} samples, only {len(pool)} "
                         f"available in classes {classes}")
    rng = substream(seed, DATA_SPLIT)
    order = rng.permutation(len(pool))
    chosen = [pool[i] for i in order[:n_train + n_test]]

    def encode(idx):
        state = encode_image(images[idx], target_dims, num_qubits)
        return state, class_to_label[int(labels[idx])]

    train = [encode(i) for i in chosen[:n_train]]
    test = [encode(i) for i in chosen[n_train:]]
    return train, test


# ---------------------------------------------------------------------------
# synthetic stand-in digits

_GLYPHS = {
    0: ["0111110",
        "1100011",
        "1100011",
        "1100011",
        "1100011",
        "1100011",
        "0111110"],
    1: ["0001100",
        "0011100",
        "0001100",
        "0001100",
        "0001100",
        "0001100",
        "0111111"],
    2: ["0111110",
        "1100011",
        "0000011",
        "0001110",
        "0011000",
        "0110000",
        "1111111"],
    3: ["1111110",
        "0000011",
        "0011110",
        "0000011",
        "1100011",
        "0111110",
        "0000000"],
}


def generate_synthetic_digits(count: int, seed: int, size: int = 28):
    """Deterministic digit-like corpus over classes 0-3.

    Each image is a 7x7 glyph scaled up, randomly shifted by up to two
    pixels, intensity-jittered, and speckled with pixel noise.
    """
    rng = substream(seed, SYNTH)
    scale = max(1, size // 7)
    proto = {}
    for digit, rows in _GLYPHS.items():
        bitmap = np.array([[int(c) for c in row] for row in rows], dtype=float)
        big = np.kron(bitmap, np.ones((scale, scale)))
        canvas = np.zeros((size, size))
        off = (size - big.shape[0]) // 2
        canvas[off:off + big.shape[0], off:off + big.shape[1]] = big
        proto[digit] = canvas
    images, labels = [], []
    for i in range(count):
        digit = int(rng.integers(0, 4))
        base = proto[digit] * float(rng.uniform(0.7, 1.0)) * 255.0
        dy, dx = int(rng.integers(-2, 3)), int(rng.integers(-2, 3))
        shifted = np.roll(np.roll(base, dy, axis=0), dx, axis=1)
        noisy = shifted + rng.normal(0.0, 16.0, size=shifted.shape)
        pixels = np.clip(noisy, 0, 255).astype(np.uint8)
        images.append(RawImage(size, size, pixels))
        labels.append(digit)
    return images, np.array(labels)


def write_synthetic_idx(images_path, labels_path, count: int, seed: int,
                        size: int = 28) -> None:
    images, labels = generate_synthetic_digits(count, seed, size)
    with open(images_path, "wb") as fh:
        fh.write(write_idx_images(images))
    with open(labels_path, "wb") as fh:
        fh.write(write_idx_labels(labels))
