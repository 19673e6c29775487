"""Straight-line reference interpreter for the adaptive power-management loop:
a naive transcription of the firmware pseudocode, one statement per line,
sharing no code with the production controller.  Tests use it as the oracle.
"""

def slope(window):
    """Least-squares slope of a window against sample index 0..n-1."""
    n = len(window)
    x_mean = (n - 1) / 2.0
    y_mean = sum(window) / n
    num = sum((i - x_mean) * (y - y_mean) for i, y in enumerate(window))
    return num / sum((i - x_mean) ** 2 for i in range(n))


def table_state(rows, volt):
    """Bucket lookup over (state, v_lo, v_hi, ...) rows; top bucket closed."""
    top = max(rows, key=lambda r: r[2])
    if volt == top[2]:
        return top[0]
    hits = [r[0] for r in rows if r[1] <= volt < r[2]]
    if not hits:
        raise ValueError(f"voltage {volt} outside table")
    return hits[0]


def reference_qos_sequence(samples, rows, v_max=3.6, v_max_tol=0.010):
    """Run the control loop over (volt, light) samples; return the QoS list."""
    light_vec = [0.0] * 5
    volt_vec = [0.0] * 5
    index = 0
    next_qos = 1
    out = []
    for volt, light in samples:
        at_max = volt >= v_max - v_max_tol
        if index == 0 or at_max:
            next_qos = table_state(rows, volt)
            index += 1
        light_vec = light_vec[1:] + [light]
        volt_vec = volt_vec[1:] + [volt]
        if light == 0 or slope(light_vec) < 0:
            next_qos -= 1
        else:
            next_qos += 1
        if slope(volt_vec) <= 0 and not at_max:
            next_qos -= 1
        else:
            next_qos += 1
        next_qos = max(1, min(7, next_qos))
        out.append(next_qos)
    return out
