"""Scene runner: batch verification jobs with machine-readable reports.

A scene is a JSON object with a fan, named objects (forms, currents,
complexes, shadows) and an ordered task list.  Each task runs one
verification and produces one report record with its verdict and any
witness or certificate; tasks may declare an ``expect`` mapping whose
entries are compared against the record.  Reports are deterministic for
a fixed seed and tolerance (timings are omitted unless requested).
"""

import csv
import io
import json
import time
from fractions import Fraction

from . import formats, gallery
from .correspond import lift, push_forward, round_trip_verify
from .currents import (balancing_check, c_finite_test, canonical_decomposition,
                       closedness_test, extend_by_zero, positivity_check, resum)
from .errors import ParseError, TropcurError, ValidationError
from .fiber import dual_pairing, positivity_verdict, reverify
from .formats import jsonable, load_json


class Scene:
    """Parsed scene: fan + named objects + ordered tasks."""

    def __init__(self, fan, objects, tasks, tol=1e-8, seed=0, samples=25):
        self.fan = fan
        self.objects = objects
        self.tasks = tasks
        self.tol = tol
        self.seed = seed
        self.samples = samples


def parse_scene(data, base_chart=None):
    if "fan" not in data:
        raise ParseError("scene needs a 'fan' entry")
    fan_data = data["fan"]
    if isinstance(fan_data, str):
        fan_data = load_json(fan_data)
    fan = formats.fan_from_json(fan_data)
    chart_id = data.get("chart")
    if chart_id is None:
        chart_id = max(range(len(fan)), key=lambda i: fan.cones[i].dim)
    chart = fan.toric_chart(chart_id)
    objects = {}
    for name, od in data.get("objects", {}).items():
        kind = od.get("type")
        if kind == "form":
            objects[name] = formats.fiber_form_from_json(od)
        elif kind == "current":
            objects[name] = formats.current_from_json(od, chart)
        elif kind == "complex":
            objects[name] = formats.weighted_complex_from_json(od)
        elif kind == "gallery":
            builder = getattr(gallery, od["name"], None)
            if builder is None:
                raise ValidationError(f"unknown gallery object {od['name']!r}")
            objects[name] = builder()
        else:
            raise ValidationError(f"object {name!r} has unknown type {kind!r}")
    tasks = list(data.get("tasks", ()))
    return Scene(fan, objects, tasks,
                 tol=float(data.get("tol", 1e-8)),
                 seed=int(data.get("seed", 0)),
                 samples=int(data.get("samples", 25))), chart


def _resolve(scene, name):
    if name not in scene.objects:
        raise ValidationError(f"task references unknown object {name!r}")
    return scene.objects[name]


def run_task(scene, chart, task, tol, seed, samples):
    op = task.get("op")
    if op == "limit_point":
        p = tuple(Fraction(str(x)) for x in task["point"])
        v = tuple(Fraction(str(x)) for x in task["direction"])
        pt = scene.fan.limit_point(p, v)
        return {"stratum": pt.stratum,
                "stratum_generators": [list(g) for g in
                                       scene.fan.cones[pt.stratum].generators],
                "coords": [formats._frac_str(c) for c in pt.coords]}
    if op == "locate_relint":
        v = tuple(Fraction(str(x)) for x in task["vector"])
        cid = scene.fan.locate_relint(v)
        return {"cone": cid,
                "generators": [list(g) for g in scene.fan.cones[cid].generators]}
    if op == "toric_chart":
        ch = scene.fan.toric_chart(int(task["cone"]))
        return formats.chart_to_json(ch)
    if op == "positivity":
        form = _resolve(scene, task["form"])
        tier = task.get("tier", "positive")
        v = positivity_verdict(form, tier, seed=seed,
                               pool_size=int(task.get("pool_size", 400)))
        return {"tier": tier, "verdict": v.answer, "reason": v.reason,
                "witness": jsonable(v.witness), "certificate": jsonable(v.certificate),
                "reverified": reverify(form, v)}
    if op == "pairing":
        a = _resolve(scene, task["left"])
        b = _resolve(scene, task["right"])
        return {"value": jsonable(dual_pairing(a, b))}
    if op == "current_positivity":
        T = _resolve(scene, task["current"])
        v = positivity_check(T, samples=samples, seed=seed)
        return {"verdict": v.answer, "reason": v.reason, "witness": jsonable(v.witness)}
    if op == "closedness":
        T = _resolve(scene, task["current"])
        v = closedness_test(T, test_basis_size=int(task.get("forms", 25)),
                            tol=tol, seed=seed)
        return {"verdict": "closed" if v.closed else "not_closed",
                "residual": v.residual, "exact": v.exact}
    if op == "c_finite":
        T = _resolve(scene, task["current"])
        v = c_finite_test(T)
        return {"verdict": v.answer, "witness": jsonable(v.witness)}
    if op == "decompose":
        T = _resolve(scene, task["current"])
        parts = canonical_decomposition(T, samples=samples, seed=seed)
        exact = resum(parts, T) == T
        return {"strata": sorted(jsonable(sorted(i + 1 for i in M)) for M in parts),
                "resum_exact": exact}
    if op == "push":
        S = _resolve(scene, task["shadow"])
        T = push_forward(S)
        return {"result": formats.current_to_json(T)}
    if op == "lift":
        T = _resolve(scene, task["current"])
        S = lift(T, samples=samples, seed=seed)
        back = push_forward(S)
        return {"round_trip_exact": back == T,
                "shadow_keys": sorted(formats._key_to_str(I, J)
                                      for (I, J) in S.shadows)}
    if op == "round_trip":
        suite = gallery.random_closed_positive_suite(
            count=int(task.get("count", 8)), seed=seed)
        rep = round_trip_verify(suite, seed=seed)
        return {"total": rep.total, "failures": jsonable(rep.failures),
                "ok": rep.ok}
    if op == "balancing":
        C = _resolve(scene, task["complex"])
        v = balancing_check(C)
        return {"verdict": "balanced" if v.balanced else "unbalanced",
                "witness": jsonable(v.witness)}
    if op == "el_mir":
        T = _resolve(scene, task["current"])
        strata = [frozenset(int(i) - 1 for i in M) for M in task.get("strata", [[1]])]
        ext = extend_by_zero(T, strata, tol=tol, seed=seed,
                             check_positive=bool(task.get("check_positive", True)))
        cv = closedness_test(ext, tol=tol, seed=seed)
        return {"extended": True, "closed": bool(cv.closed), "residual": cv.residual}
    if op == "counterexamples":
        return counterexample_suite(tol=tol, seed=seed, samples=samples)
    raise ValidationError(f"unknown task op {op!r}")


def counterexample_suite(tol=1e-8, seed=0, samples=10):
    """Run the built-in counterexample gallery; every record re-verifies."""
    out = {}
    T1 = gallery.positive_not_liftable()
    v = positivity_check(T1, samples=samples, seed=seed)
    cf = c_finite_test(T1)
    cv = closedness_test(T1, tol=tol, seed=seed, test_basis_size=10)
    out["density_exp_x2"] = {
        "positive": v.answer, "c_finite": cf.answer,
        "c_finite_witness": jsonable(cf.witness),
        "closed": "closed" if cv.closed else "not_closed",
        "closedness_residual": cv.residual}
    T3 = gallery.positive_not_positively_liftable()
    out["density_exp_2x"] = {
        "positive": positivity_check(T3, samples=samples, seed=seed).answer,
        "c_finite": c_finite_test(T3).answer}
    T1p = gallery.closed_not_positive()
    cv = closedness_test(T1p, tol=tol, seed=seed)
    v = positivity_check(T1p, samples=samples, seed=seed)
    lift_rejected = False
    try:
        lift(T1p, samples=4, seed=seed)
    except TropcurError:
        lift_rejected = True
    out["evaluator_exp_2ex"] = {
        "closed": "closed" if cv.closed else "not_closed",
        "positive": v.answer,
        "negative_value": jsonable(v.witness[2]) if v.witness else None,
        "lift_rejected": lift_rejected}
    from .fans import orthant_fan
    fan1 = orthant_fan(1)
    chart1 = fan1.toric_chart(fan1.cone_id([(1,)]))
    from .correspond import kernel_point_current
    K = kernel_point_current(chart1)
    out["kernel_point"] = {
        "nonzero": not K.is_zero(),
        "pushforward_zero": push_forward(K).is_zero()}
    Tdeg = gallery.degenerate_form_current()
    v = positivity_check(Tdeg, samples=samples, seed=seed)
    out["degenerate_form_current"] = {
        "positive": v.answer, "witness_kind": v.witness[0] if v.witness else None}
    Tder = gallery.derivative_atom_current()
    out["derivative_atom"] = {
        "is_measure_class": Tder.is_measure_class(),
        "positive": positivity_check(Tder, samples=4, seed=seed).answer}
    return out


def run(scene, chart, timings=False):
    """Execute a scene; returns (report dict, exit code)."""
    records = []
    mismatches = 0
    for idx, task in enumerate(scene.tasks):
        t0 = time.perf_counter()
        record = {"id": task.get("id", idx), "op": task.get("op")}
        try:
            data = run_task(scene, chart, task, scene.tol, scene.seed, scene.samples)
            record.update(jsonable(data))
            record["status"] = "ok"
        except TropcurError as err:
            record["status"] = "error"
            record["error"] = type(err).__name__
            record["message"] = str(err)
            record["payload"] = jsonable(err.payload)
        if timings:
            record["timing_ms"] = round((time.perf_counter() - t0) * 1000, 3)
        else:
            record["timing_ms"] = None
        expect = task.get("expect")
        if expect:
            bad = {k: (record.get(k), v) for k, v in expect.items()
                   if jsonable(record.get(k)) != jsonable(v)}
            record["expected_ok"] = not bad
            if bad:
                record["expect_mismatch"] = jsonable(bad)
                mismatches += 1
        records.append(record)
    report = {"seed": scene.seed, "tol": scene.tol, "tasks": records}
    return report, (1 if mismatches else 0)


def report_to_csv(report):
    buf = io.StringIO()
    fields = sorted({k for rec in report["tasks"] for k in rec})
    writer = csv.DictWriter(buf, fieldnames=fields)
    writer.writeheader()
    for rec in report["tasks"]:
        writer.writerow({k: json.dumps(rec.get(k), sort_keys=True)
                         if isinstance(rec.get(k), (dict, list)) else rec.get(k)
                         for k in fields})
    return buf.getvalue()
