"""
PNG previews of bound-state fields and spectra.

Fields are drawn with a diverging red/blue map on the real part (phase
fixed so the largest amplitude is real and positive), one panel per layer.
"""
import logging
import os

import numpy as np
from PIL import Image, ImageDraw

from src.data.storage import ensure_dir

logger = logging.getLogger(__name__)

PIXELS_PER_SITE = 6
PANEL_GAP = 8
BACKGROUND = (255, 255, 255)


def _diverging(values, vmax):
    """RGB array: white at 0, red for positive, blue for negative."""
    x = np.clip(values / vmax, -1.0, 1.0) if vmax > 0 else np.zeros_like(values)
    rgb = np.empty(x.shape + (3,), dtype=np.uint8)
    pos = np.clip(x, 0, 1)
    neg = np.clip(-x, 0, 1)
    rgb[..., 0] = (255 * (1 - neg)).astype(np.uint8)
    rgb[..., 1] = (255 * (1 - pos - neg)).astype(np.uint8)
    rgb[..., 2] = (255 * (1 - pos)).astype(np.uint8)
    return rgb


def field_to_image(field, vmax=None, scale=PIXELS_PER_SITE):
    """One panel; row 0 of the array (smallest n_y) ends up at the bottom."""
    field = np.asarray(field)
    peak = field.flat[np.argmax(np.abs(field))] if field.size else 0
    phase = np.conj(peak) / abs(peak) if peak != 0 else 1.0
    values = np.real(field * phase)
    vmax = np.max(np.abs(values)) if vmax is None else vmax
    img = Image.fromarray(_diverging(values[::-1], vmax))
    return img.resize((img.width * scale, img.height * scale), Image.Resampling.NEAREST)


def save_field_png(sol, path, half_width=None):
    """Both layers of a BoundStateSolution side by side, on a shared colour scale."""
    if half_width is None:
        a1, a2 = sol.field_a1, sol.field_a2
    else:
        a1, a2 = sol.window(1, half_width), sol.window(2, half_width)
    vmax = max(np.max(np.abs(a1)), np.max(np.abs(a2)))
    panels = [field_to_image(a1, vmax), field_to_image(a2, vmax)]
    width = sum(p.width for p in panels) + PANEL_GAP
    canvas = Image.new("RGB", (width, max(p.height for p in panels)), BACKGROUND)
    canvas.paste(panels[0], (0, 0))
    canvas.paste(panels[1], (panels[0].width + PANEL_GAP, 0))
    ensure_dir(os.path.dirname(path) or ".")
    canvas.save(path)
    logger.info("wrote %s", path)
    return path


def save_spectrum_png(energies, labels, path, height=240):
    """Sorted energies as a dot plot coloured by mode label."""
    colours = {"bulk": (120, 120, 120), "edge": (30, 90, 200), "corner": (220, 40, 40)}
    energies = np.asarray(energies, dtype=float)
    n = energies.size
    canvas = Image.new("RGB", (max(2 * n + 20, 40), height), BACKGROUND)
    draw = ImageDraw.Draw(canvas)
    span = np.max(np.abs(energies)) if n else 1.0
    span = span if span > 0 else 1.0
    for k, (e, label) in enumerate(zip(energies, labels)):
        x = 10 + 2 * k
        y = int((height - 20) * (0.5 - 0.5 * e / span)) + 10
        draw.rectangle((x - 1, y - 1, x + 1, y + 1), fill=colours.get(label, (0, 0, 0)))
    ensure_dir(os.path.dirname(path) or ".")
    canvas.save(path)
    logger.info("wrote %s", path)
    return path
