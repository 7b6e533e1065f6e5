"""The 17 image corruptions with their severity parameter ladders.

Every corruption preserves dimensions, computes in normalized float with a
single clamp-to-[0,1] before the uint8 boundary, and is a pure function of
(image, severity, seed). ``stylize`` is the one exception to locality: it is
delegated to a transform service (or its deterministic stub) because the
underlying style transfer is neural.
"""

from __future__ import annotations

import io
import math

import numpy as np
from PIL import Image
from scipy import ndimage
from skimage import color as skcolor

from .core import to_float, to_uint8, require_rgb8
from .errors import InputTooSmallError, ServiceUnavailableError, UnknownMethodError

__all__ = [
    "IMAGE_SEVERITY",
    "apply_image_perturbation",
    "add_noise",
    "blur",
    "zoom_blur",
    "weather",
    "digital",
    "diamond_square",
]

# Severity ladders. Tuple semantics per method:
#   gaussian/speckle: noise sigma
#   shot/impulse: replaced-pixel fraction
#   defocus: (disk radius, alias blur sigma)
#   glass: (blur sigma, max shuffle delta, iterations)
#   motion: (kernel radius, line sigma)
#   zoom: maximum zoom factor (steps of 0.01 from 1.00)
#   snow: (layer mean, layer sigma, layer zoom, threshold, mb radius, mb sigma, blend)
#   frost: (image weight, frost weight)
#   fog: (intensity, plasma decay)
#   brightness: value-channel shift
#   contrast: scale about the per-channel mean
#   elastic: (displacement alpha, field sigma, affine jitter) as fractions of image size
#   pixelate: downscale factor
#   jpeg: encoder quality
IMAGE_SEVERITY = {
    "gaussian_noise": (0.08, 0.12, 0.18, 0.26, 0.38),
    "shot_noise": (0.03, 0.06, 0.09, 0.17, 0.27),
    "impulse_noise": (0.03, 0.06, 0.09, 0.17, 0.27),
    # Not in the benchmark's parameter table; standard large-image ladder.
    "speckle_noise": (0.15, 0.20, 0.35, 0.45, 0.60),
    "defocus_blur": ((3, 0.1), (4, 0.5), (6, 0.5), (8, 0.5), (10, 0.5)),
    "glass_blur": ((0.7, 1, 2), (0.9, 2, 1), (1, 2, 3), (1.1, 3, 2), (1.5, 4, 2)),
    "motion_blur": ((10, 3), (15, 5), (15, 8), (15, 12), (20, 15)),
    "zoom_blur": (1.11, 1.16, 1.21, 1.26, 1.33),
    "snow": (
        (0.1, 0.3, 3, 0.5, 10, 4, 0.8),
        (0.2, 0.3, 2, 0.5, 12, 4, 0.7),
        (0.55, 0.3, 4, 0.9, 12, 8, 0.7),
        (0.55, 0.3, 4.5, 0.85, 12, 8, 0.65),
        (0.55, 0.3, 2.5, 0.85, 12, 12, 0.55),
    ),
    "frost": ((1, 0.4), (0.8, 0.6), (0.7, 0.7), (0.65, 0.7), (0.6, 0.75)),
    "fog": ((1.5, 2), (2, 2), (2.5, 1.7), (2.5, 1.5), (3, 1.4)),
    "brightness": (0.1, 0.2, 0.3, 0.4, 0.5),
    "contrast": (0.4, 0.3, 0.2, 0.1, 0.05),
    # The five canonical tuples, assigned to severities by measured distortion
    # (mean SSIM on the fixture corpus) so severity stays a monotone ladder;
    # the raw published order puts the two affine-dominated tuples first.
    "elastic": (
        (0.05, 0.01, 0.02),
        (0.07, 0.01, 0.02),
        (0.12, 0.01, 0.02),
        (2.0, 0.7, 0.1),
        (2.0, 0.08, 0.2),
    ),
    "pixelate": (0.6, 0.5, 0.4, 0.3, 0.25),
    "jpeg_compression": (25, 18, 15, 10, 7),
}


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def _check_severity(severity: int):
    if severity not in (1, 2, 3, 4, 5):
        raise ValueError(f"severity must be in 1..5, got {severity}")


# ------------------------------------------------------------------ noise

def _gaussian_noise(x, severity, rng):
    sigma = IMAGE_SEVERITY["gaussian_noise"][severity - 1]
    return np.clip(x + sigma * rng.standard_normal(x.shape), 0, 1)


def _salt_pepper_mask(shape_hw, amount, rng):
    return rng.random(shape_hw) < amount


def _shot_noise(x, severity, rng):
    # Whole-pixel salt/pepper: a chosen pixel goes uniformly black or white.
    amount = IMAGE_SEVERITY["shot_noise"][severity - 1]
    h, w = x.shape[:2]
    mask = _salt_pepper_mask((h, w), amount, rng)
    salt = rng.random((h, w)) < 0.5
    out = x.copy()
    out[mask & salt] = 1.0
    out[mask & ~salt] = 0.0
    return out


def _impulse_noise(x, severity, rng):
    # Color analogue: chosen pixels get independent per-channel bit values.
    amount = IMAGE_SEVERITY["impulse_noise"][severity - 1]
    h, w = x.shape[:2]
    mask = _salt_pepper_mask((h, w), amount, rng)
    bits = (rng.random((h, w, 3)) < 0.5).astype(np.float64)
    out = x.copy()
    out[mask] = bits[mask]
    return out


def _speckle_noise(x, severity, rng):
    sigma = IMAGE_SEVERITY["speckle_noise"][severity - 1]
    return np.clip(x + x * sigma * rng.standard_normal(x.shape), 0, 1)


def add_noise(img: np.ndarray, kind: str, severity: int, seed) -> np.ndarray:
    """Apply one of the four noise corruptions to an RGB uint8 image."""
    _check_severity(severity)
    fns = {
        "gaussian": _gaussian_noise,
        "shot": _shot_noise,
        "impulse": _impulse_noise,
        "speckle": _speckle_noise,
    }
    if kind not in fns:
        raise UnknownMethodError(f"unknown noise kind: {kind!r}")
    return to_uint8(fns[kind](to_float(img), severity, _rng(seed)))


# ------------------------------------------------------------------ blur

def _disk_kernel(radius, alias_blur):
    if radius <= 8:
        grid = np.arange(-8, 9)
        blur_radius = 1
    else:
        grid = np.arange(-radius, radius + 1)
        blur_radius = 2
    xx, yy = np.meshgrid(grid, grid)
    kernel = ((xx ** 2 + yy ** 2) <= radius ** 2).astype(np.float64)
    kernel /= kernel.sum()
    kernel = ndimage.gaussian_filter(kernel, sigma=alias_blur, radius=blur_radius)
    return kernel / kernel.sum()


def _convolve_channels(x, kernel):
    out = np.empty_like(x)
    for c in range(x.shape[2]):
        out[:, :, c] = ndimage.convolve(x[:, :, c], kernel, mode="reflect")
    return out


def _gaussian_blur_channels(x, sigma):
    return ndimage.gaussian_filter(x, sigma=(sigma, sigma, 0), mode="reflect")


def _defocus_blur(x, severity, rng):
    radius, alias = IMAGE_SEVERITY["defocus_blur"][severity - 1]
    kernel = _disk_kernel(radius, alias)
    if kernel.shape[0] > min(x.shape[0], x.shape[1]):
        raise InputTooSmallError(
            f"image {x.shape[1]}x{x.shape[0]} smaller than {kernel.shape[0]}px blur kernel"
        )
    return np.clip(_convolve_channels(x, kernel), 0, 1)


def _glass_blur(x, severity, rng):
    sigma, max_delta, iterations = IMAGE_SEVERITY["glass_blur"][severity - 1]
    h, w = x.shape[:2]
    if h <= 2 * max_delta or w <= 2 * max_delta:
        raise InputTooSmallError(f"image too small for glass blur delta {max_delta}")
    out = _gaussian_blur_channels(x, sigma)
    # Swap each interior pixel with a uniformly chosen neighbor within +-max_delta.
    hs = np.arange(h - max_delta - 1, max_delta, -1)
    ws = np.arange(w - max_delta - 1, max_delta, -1)
    hh, ww = np.meshgrid(hs, ws, indexing="ij")
    for _ in range(iterations):
        dy = rng.integers(-max_delta, max_delta + 1, size=hh.shape)
        dx = rng.integers(-max_delta, max_delta + 1, size=hh.shape)
        hp, wp = hh + dy, ww + dx
        out[hh, ww], out[hp, wp] = out[hp, wp], out[hh, ww]
    return np.clip(_gaussian_blur_channels(out, sigma), 0, 1)


def _motion_kernel(radius, sigma, angle_deg):
    size = 2 * radius + 1
    line = np.zeros((size, size))
    profile = np.exp(-0.5 * (np.arange(size) - radius) ** 2 / sigma ** 2)
    line[:, radius] = profile / profile.sum()
    kernel = ndimage.rotate(line, angle_deg, reshape=False, order=1)
    kernel = np.maximum(kernel, 0)
    return kernel / kernel.sum()


def _motion_blur(x, severity, rng):
    radius, sigma = IMAGE_SEVERITY["motion_blur"][severity - 1]
    if 2 * radius + 1 > min(x.shape[0], x.shape[1]):
        raise InputTooSmallError(f"image too small for motion blur radius {radius}")
    angle = rng.uniform(-45.0, 45.0)
    kernel = _motion_kernel(radius, sigma, angle)
    return np.clip(_convolve_channels(x, kernel), 0, 1)


def blur(img: np.ndarray, kind: str, severity: int, seed) -> np.ndarray:
    """Defocus, glass, or motion blur on an RGB uint8 image."""
    _check_severity(severity)
    fns = {"defocus": _defocus_blur, "glass": _glass_blur, "motion": _motion_blur}
    if kind not in fns:
        raise UnknownMethodError(f"unknown blur kind: {kind!r}")
    return to_uint8(fns[kind](to_float(img), severity, _rng(seed)))


def _clipped_zoom(x, factor):
    h, w = x.shape[:2]
    ch = int(np.ceil(h / factor))
    cw = int(np.ceil(w / factor))
    top = (h - ch) // 2
    left = (w - cw) // 2
    zoomed = ndimage.zoom(x[top:top + ch, left:left + cw], (factor, factor) + (1,) * (x.ndim - 2),
                          order=1, mode="nearest")
    trim_t = (zoomed.shape[0] - h) // 2
    trim_l = (zoomed.shape[1] - w) // 2
    return zoomed[trim_t:trim_t + h, trim_l:trim_l + w]


def _zoom_factors(severity):
    top = IMAGE_SEVERITY["zoom_blur"][severity - 1]
    return [i / 100.0 for i in range(100, int(round(top * 100)) + 1)]


def _zoom_blur(x, severity, rng):
    acc = np.zeros_like(x)
    factors = _zoom_factors(severity)
    for factor in factors:
        acc += _clipped_zoom(x, factor)
    return np.clip((acc + x) / (len(factors) + 1), 0, 1)


def zoom_blur(img: np.ndarray, severity: int, seed=0) -> np.ndarray:
    """Average of center-cropped rescalings from 1.00 up to the severity's max factor."""
    _check_severity(severity)
    return to_uint8(_zoom_blur(to_float(img), severity, _rng(seed)))


# ------------------------------------------------------------------ weather

def diamond_square(side_exp: int, wibble_decay: float, seed, amplitude: float = 1.0) -> np.ndarray:
    """Classic midpoint-displacement fractal heightmap of side 2**side_exp + 1.

    The four corners initialize to 0; each refinement step displaces midpoints
    by uniform(-a, a) with a divided by ``wibble_decay`` per step.
    """
    if side_exp < 1:
        raise ValueError("side_exp must be >= 1")
    side = 2 ** side_exp + 1
    rng = _rng(seed)
    grid = np.zeros((side, side))
    step = side - 1
    amp = float(amplitude)
    while step >= 2:
        half = step // 2
        # Square step: centers of squares get the corner mean plus a wibble.
        centers_i = np.arange(half, side, step)
        ci, cj = np.meshgrid(centers_i, centers_i, indexing="ij")
        corner_mean = (
            grid[ci - half, cj - half] + grid[ci - half, cj + half]
            + grid[ci + half, cj - half] + grid[ci + half, cj + half]
        ) / 4.0
        grid[ci, cj] = corner_mean + rng.uniform(-amp, amp, size=ci.shape)
        # Diamond step: edge midpoints get the mean of in-bounds axial neighbors.
        for parity, starts in ((0, np.arange(half, side, step)), (1, np.arange(0, side, step))):
            rows = starts if parity == 0 else np.arange(0, side, step)
            cols = np.arange(0, side, step) if parity == 0 else np.arange(half, side, step)
            ri, rj = np.meshgrid(rows, cols, indexing="ij")
            total = np.zeros(ri.shape)
            count = np.zeros(ri.shape)
            for di, dj in ((-half, 0), (half, 0), (0, -half), (0, half)):
                ni, nj = ri + di, rj + dj
                valid = (ni >= 0) & (ni < side) & (nj >= 0) & (nj < side)
                total[valid] += grid[ni[valid], nj[valid]]
                count[valid] += 1
            grid[ri, rj] = total / count + rng.uniform(-amp, amp, size=ri.shape)
        step = half
        amp /= wibble_decay
    return grid


def _normalized_plasma(h, w, decay, rng):
    side_exp = max(1, int(math.ceil(math.log2(max(h, w, 2) - 1))))
    heightmap = diamond_square(side_exp, decay, rng.integers(0, 2 ** 63))
    patch = heightmap[:h, :w]
    lo, hi = patch.min(), patch.max()
    if hi - lo <= 0:
        return np.zeros((h, w))
    return (patch - lo) / (hi - lo)


def _fog(x, severity, rng):
    intensity, decay = IMAGE_SEVERITY["fog"][severity - 1]
    h, w = x.shape[:2]
    plasma = _normalized_plasma(h, w, decay, rng)
    max_val = x.max()
    if max_val <= 0:
        max_val = 1.0
    out = (x + intensity * plasma[:, :, None]) * max_val / (max_val + intensity)
    return np.clip(out, 0, 1)


def _brightness(x, severity, rng):
    shift = IMAGE_SEVERITY["brightness"][severity - 1]
    hsv = skcolor.rgb2hsv(x)
    hsv[:, :, 2] = np.clip(hsv[:, :, 2] + shift, 0, 1)
    return np.clip(skcolor.hsv2rgb(hsv), 0, 1)


_FROST_TEXTURE_COUNT = 5


def _frost_texture(h, w, index):
    """Procedural ice-crystal texture: Voronoi cell walls plus streaks.

    Deterministic per (size, index); bundled photographic assets are avoided
    to keep the package self-contained.
    """
    rng = _rng((index + 1) * 0x9E3779B97F4A7C15 + h * 31 + w)
    yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
    n_sites = max(12, (h * w) // 900)
    sy = rng.uniform(0, h, n_sites)
    sx = rng.uniform(0, w, n_sites)
    d1 = np.full((h, w), np.inf)
    d2 = np.full((h, w), np.inf)
    for cy, cx in zip(sy, sx):
        d = np.hypot(yy - cy, xx - cx)
        closer = d < d1
        d2 = np.where(closer, d1, np.minimum(d2, d))
        d1 = np.where(closer, d, d1)
    # Cell boundaries read as crystal edges; interiors stay translucent.
    edges = np.clip(1.0 - (d2 - d1) / (0.18 * max(h, w) / math.sqrt(n_sites) + 1e-9), 0, 1)
    streaks = rng.random((h, w)) ** 8
    streaks = ndimage.gaussian_filter(streaks, sigma=(0.5, 6.0), mode="wrap")
    streaks = (streaks - streaks.min()) / (np.ptp(streaks) + 1e-9)
    tex = 0.55 + 0.45 * np.clip(0.7 * edges + 0.6 * streaks, 0, 1)
    tint = np.array([0.93, 0.97, 1.0])
    return np.clip(tex[:, :, None] * tint[None, None, :], 0, 1)


def _frost(x, severity, rng):
    w_img, w_frost = IMAGE_SEVERITY["frost"][severity - 1]
    h, w = x.shape[:2]
    index = int(rng.integers(0, _FROST_TEXTURE_COUNT))
    margin = 16
    tex = _frost_texture(h + margin, w + margin, index)
    oy = int(rng.integers(0, margin + 1))
    ox = int(rng.integers(0, margin + 1))
    tex = tex[oy:oy + h, ox:ox + w]
    return np.clip(w_img * x + w_frost * tex, 0, 1)


def _snow(x, severity, rng):
    mean, sigma, zoom, threshold, mb_radius, mb_sigma, blend = IMAGE_SEVERITY["snow"][severity - 1]
    h, w = x.shape[:2]
    layer = rng.normal(loc=mean, scale=sigma, size=(h, w))
    # Nearest-neighbor zoom scales flake size without disturbing the value
    # distribution, so the threshold keeps its tail meaning at every severity.
    ch = int(np.ceil(h / zoom))
    cw = int(np.ceil(w / zoom))
    top, left = (h - ch) // 2, (w - cw) // 2
    layer = ndimage.zoom(layer[top:top + ch, left:left + cw], (zoom, zoom), order=0, mode="nearest")
    layer = layer[:h, :w]
    layer[layer < threshold] = 0.0
    layer = np.clip(layer, 0, 1)
    angle = rng.uniform(-135.0, -45.0)
    kernel = _motion_kernel(mb_radius, mb_sigma, angle)
    layer = ndimage.convolve(layer, kernel, mode="reflect")
    gray = x.mean(axis=2, keepdims=True)
    darkened = blend * x + (1 - blend) * np.maximum(x, gray * 1.5 + 0.5)
    return np.clip(darkened + layer[:, :, None], 0, 1)


def weather(img: np.ndarray, kind: str, severity: int, seed) -> np.ndarray:
    """Snow, frost, fog, or brightness on an RGB uint8 image."""
    _check_severity(severity)
    fns = {"snow": _snow, "frost": _frost, "fog": _fog, "brightness": _brightness}
    if kind not in fns:
        raise UnknownMethodError(f"unknown weather kind: {kind!r}")
    return to_uint8(fns[kind](to_float(img), severity, _rng(seed)))


# ------------------------------------------------------------------ digital

def _contrast(x, severity, rng):
    scale = IMAGE_SEVERITY["contrast"][severity - 1]
    means = x.mean(axis=(0, 1), keepdims=True)
    return np.clip((x - means) * scale + means, 0, 1)


def _pixelate(x, severity, rng):
    factor = IMAGE_SEVERITY["pixelate"][severity - 1]
    h, w = x.shape[:2]
    im = Image.fromarray(to_uint8(x))
    small = im.resize((max(1, int(w * factor)), max(1, int(h * factor))), Image.BOX)
    big = small.resize((w, h), Image.NEAREST)
    return np.asarray(big).astype(np.float64) / 255.0


def _jpeg(x, severity, rng):
    from .errors import CodecError

    quality = IMAGE_SEVERITY["jpeg_compression"][severity - 1]
    buf = io.BytesIO()
    try:
        Image.fromarray(to_uint8(x)).save(buf, format="JPEG", quality=quality, subsampling=2)
        buf.seek(0)
        decoded = np.asarray(Image.open(buf).convert("RGB"))
    except OSError as exc:
        raise CodecError(f"jpeg round-trip failed: {exc}") from exc
    return decoded.astype(np.float64) / 255.0


def _affine_matrix(src, dst):
    # Solve the 2x3 affine mapping dst -> src for three point pairs.
    a = np.column_stack([dst, np.ones(3)])
    coeffs = np.linalg.solve(a, src)  # (3, 2): [row_out, col_out, 1] @ coeffs = src
    return coeffs


def _elastic(x, severity, rng):
    alpha_f, sigma_f, jitter_f = IMAGE_SEVERITY["elastic"][severity - 1]
    h, w = x.shape[:2]
    size = min(h, w)
    alpha, sigma, jitter = alpha_f * size, sigma_f * size, jitter_f * size

    center = np.array([h, w], dtype=np.float64) / 2.0
    square = size / 3.0
    src = np.array(
        [center + square, [center[0] + square, center[1] - square], center - square]
    )
    dst = src + rng.uniform(-jitter, jitter, size=src.shape)
    coeffs = _affine_matrix(src, dst)

    rows, cols = np.meshgrid(np.arange(h), np.arange(w), indexing="ij")
    base = np.stack([rows.ravel(), cols.ravel(), np.ones(h * w)], axis=1)
    mapped = base @ coeffs
    warped = np.empty_like(x)
    for c in range(3):
        warped[:, :, c] = ndimage.map_coordinates(
            x[:, :, c], [mapped[:, 0].reshape(h, w), mapped[:, 1].reshape(h, w)],
            order=1, mode="mirror",
        )

    dx = ndimage.gaussian_filter(rng.uniform(-1, 1, size=(h, w)), sigma, mode="reflect") * alpha
    dy = ndimage.gaussian_filter(rng.uniform(-1, 1, size=(h, w)), sigma, mode="reflect") * alpha
    out = np.empty_like(x)
    for c in range(3):
        out[:, :, c] = ndimage.map_coordinates(
            warped[:, :, c], [rows + dy, cols + dx], order=1, mode="mirror"
        )
    return np.clip(out, 0, 1)


def digital(img: np.ndarray, kind: str, severity: int, seed) -> np.ndarray:
    """Contrast, elastic, pixelate, or JPEG compression on an RGB uint8 image."""
    _check_severity(severity)
    fns = {"contrast": _contrast, "elastic": _elastic, "pixelate": _pixelate, "jpeg": _jpeg}
    if kind not in fns:
        raise UnknownMethodError(f"unknown digital kind: {kind!r}")
    return to_uint8(fns[kind](to_float(img), severity, _rng(seed)))


# ------------------------------------------------------------------ dispatch

_DISPATCH = {
    "gaussian_noise": lambda img, s, seed: add_noise(img, "gaussian", s, seed),
    "shot_noise": lambda img, s, seed: add_noise(img, "shot", s, seed),
    "impulse_noise": lambda img, s, seed: add_noise(img, "impulse", s, seed),
    "speckle_noise": lambda img, s, seed: add_noise(img, "speckle", s, seed),
    "defocus_blur": lambda img, s, seed: blur(img, "defocus", s, seed),
    "glass_blur": lambda img, s, seed: blur(img, "glass", s, seed),
    "motion_blur": lambda img, s, seed: blur(img, "motion", s, seed),
    "zoom_blur": lambda img, s, seed: zoom_blur(img, s, seed),
    "snow": lambda img, s, seed: weather(img, "snow", s, seed),
    "frost": lambda img, s, seed: weather(img, "frost", s, seed),
    "fog": lambda img, s, seed: weather(img, "fog", s, seed),
    "brightness": lambda img, s, seed: weather(img, "brightness", s, seed),
    "contrast": lambda img, s, seed: digital(img, "contrast", s, seed),
    "elastic": lambda img, s, seed: digital(img, "elastic", s, seed),
    "pixelate": lambda img, s, seed: digital(img, "pixelate", s, seed),
    "jpeg_compression": lambda img, s, seed: digital(img, "jpeg", s, seed),
}


def apply_image_perturbation(img: np.ndarray, spec, seed, stylizer=None) -> np.ndarray:
    """Dispatch one manifest entry onto an image.

    ``stylizer`` (a services stylize client or stub) is required only for the
    ``stylize`` method; all other methods are local and ignore it.
    """
    require_rgb8(img)
    if spec.modality != "image":
        raise ValueError(f"expected an image spec, got modality {spec.modality!r}")
    if spec.method == "stylize":
        if stylizer is None:
            raise ServiceUnavailableError("stylize requires a transform service client or stub")
        out = stylizer.stylize(img, spec.severity)
        return require_rgb8(np.asarray(out))
    fn = _DISPATCH.get(spec.method)
    if fn is None:
        raise UnknownMethodError(f"unknown image method: {spec.method!r}")
    return fn(img, spec.severity, seed)
