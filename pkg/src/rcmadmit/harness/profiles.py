"""Scripted human-wrench profiles standing in for a live operator.

A profile is a sampled wrench trajectory; the runner linearly interpolates it
at the control ticks and reads zero outside the sampled range.
"""

import numpy as np

from ..errors import ConfigError


class ForceProfile:
    """Sampled 6-dof wrench over time, linearly interpolated."""

    def __init__(self, times, wrenches):
        times = np.asarray(times, dtype=float)
        wrenches = np.asarray(wrenches, dtype=float)
        if times.ndim != 1 or wrenches.shape != (times.size, 6):
            raise ConfigError("profile needs times (m,) and wrenches (m, 6)")
        if times.size == 0:
            raise ConfigError("profile is empty")
        if not (np.isfinite(times).all() and np.isfinite(wrenches).all()):
            raise ConfigError("profile contains non-finite values")
        if times.size > 1 and not (np.diff(times) > 0.0).all():
            raise ConfigError("profile times must be strictly increasing")
        self.times = times
        self.wrenches = wrenches

    def sample(self, t):
        """Wrench at time ``t`` (zero outside the sampled range)."""
        if t < self.times[0] or t > self.times[-1]:
            return np.zeros(6)
        out = np.empty(6)
        for i in range(6):
            out[i] = np.interp(t, self.times, self.wrenches[:, i])
        return out

    @classmethod
    def zero(cls):
        return cls(np.array([0.0]), np.zeros((1, 6)))

    @classmethod
    def load(cls, path):
        """Read ``t fx fy fz tx ty tz`` rows (s, N, N m), '#' comments."""
        times, rows = [], []
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                text = raw.split("#", 1)[0].strip()
                if not text:
                    continue
                parts = text.split()
                if len(parts) != 7:
                    raise ConfigError("expected 't fx fy fz tx ty tz'", line=lineno)
                try:
                    values = [float(v) for v in parts]
                except ValueError as exc:
                    raise ConfigError(f"bad number: {exc}", line=lineno) from exc
                times.append(values[0])
                rows.append(values[1:])
        if not times:
            raise ConfigError(f"profile file {path} has no samples")
        try:
            return cls(np.asarray(times), np.asarray(rows))
        except ConfigError as exc:
            raise ConfigError(f"{path}: {exc}") from exc

    def save(self, path):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("# t fx fy fz tx ty tz\n")
            for t, w in zip(self.times, self.wrenches):
                cols = " ".join(repr(float(v)) for v in w)
                fh.write(f"{float(t)!r} {cols}\n")


def _smooth_ramp(x):
    """C1 ramp: 0 -> 1 over x in [0, 1]."""
    x = np.clip(x, 0.0, 1.0)
    return x * x * (3.0 - 2.0 * x)


def press_profile(direction, peak, duration, rise=6.0, hold=6.0, release=4.0,
                  rate=100.0, settle=2.0):
    """Approach/press/retreat archetype along a fixed wrench direction.

    Ramps smoothly from zero after ``settle``, holds ``peak`` times the unit
    ``direction`` (6-vector) for ``hold`` seconds, then releases over
    ``release``. The slow ramps matter: the target model is a unit virtual
    mass, so a fast-rising large force in free space means a fast tool.
    """
    direction = np.asarray(direction, dtype=float)
    direction = direction / np.linalg.norm(direction)
    t = np.arange(0.0, duration + 0.5 / rate, 1.0 / rate)
    up = _smooth_ramp((t - settle) / rise)
    down = 1.0 - _smooth_ramp((t - settle - rise - hold) / release)
    magnitude = peak * np.minimum(up, down)
    return ForceProfile(t, np.outer(magnitude, direction))


def guidance_profile(duration=30.0, seed=0, lateral_peak=1.5, axial_peak=0.4,
                     press_peak=12.0, press_direction=(0.0, 0.0, -1.0),
                     rate=100.0):
    """Synthetic kinesthetic guidance: gentle multi-sine steering, then one
    slow press episode toward the forbidden region in the last third.

    Forces are end-effector wrenches in base coordinates. The target model
    has unit virtual mass and damping of a few tens, so free-space steering
    forces stay small (a real operator nudges, not shoves); only the press
    reaches tens of N, matching the reported interaction scale.
    """
    rng = np.random.default_rng(seed)
    t = np.arange(0.0, duration + 0.5 / rate, 1.0 / rate)
    wrenches = np.zeros((t.size, 6))
    peaks = (lateral_peak, 0.6 * lateral_peak, axial_peak)
    for axis in range(3):
        freqs = rng.uniform(0.1, 0.35, size=2)
        phases = rng.uniform(0.0, 2.0 * np.pi, size=2)
        amps = rng.uniform(0.4, 1.0, size=2) * peaks[axis]
        for f, ph, a in zip(freqs, phases, amps):
            wrenches[:, axis] += a * np.sin(2.0 * np.pi * f * t + ph)
    # The steering dies down before the press so the press aim stays true.
    press_start = 2.0 * duration / 3.0 - 4.0
    envelope = np.minimum(
        _smooth_ramp(t / 3.0),
        1.0 - _smooth_ramp((t - press_start + 3.0) / 3.0),
    )
    wrenches *= envelope[:, None]
    press = press_profile(
        np.concatenate([np.asarray(press_direction, dtype=float), np.zeros(3)]),
        peak=press_peak,
        duration=duration,
        rise=4.0,
        hold=2.0,
        release=3.0,
        rate=rate,
        settle=press_start,
    )
    wrenches += press.wrenches
    # Keep the summed force inside the reported interaction scale.
    norms = np.linalg.norm(wrenches[:, :3], axis=1)
    over = norms > 30.0
    wrenches[over, :3] *= (30.0 / norms[over])[:, None]
    return ForceProfile(t, wrenches)
