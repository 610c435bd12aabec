"""Reactive discrete-event runtime over the scenario clock.

Time advances in integer ticks. Each tick, every due sensor (in expanded IRI
order) samples its generator, wraps the value in a signal, transmits the
signal to the decider, and the decider evaluates its rules. A firing rule
set yields at most one activation event per signal evaluation, whose actions
are then executed as actuation and alert records (actuations first).

Everything is deterministic: fresh IRIs are minted from the sensor name and
sample index, timestamps are start + tick * tick_seconds, and noise comes
from SplitMix64 streams split per sensor. Equal configs give byte-identical
graph emissions and event logs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import ROUND_HALF_EVEN, Decimal

from . import namespaces as ns
from .canon import dumps_canonical, format_datetime_utc, parse_datetime_utc
from .config import (
    ConstantGen,
    Generator,
    ListGen,
    NoisyGen,
    RampGen,
    ScenarioConfig,
    SensorSpec,
    SineGen,
)
from .errors import (
    ActionTargetMissingError,
    NotAMeasurementError,
    NotAnActivationEventError,
    ScenarioError,
    SensorNotInGraphError,
    TwingraphError,
    UnknownPrefixError,
)
from .graph import Graph, Iri
from .ontology import Registry, load_seed
from .rules import ActionKind, evaluate_rule
from .signals import SignalPayload

# --- event records ---

MEASUREMENT = "measurement"
SIGNAL = "signal"
TRANSMISSION = "transmission"
DECISION = "decision"
ACTIVATION = "activation"
ACTUATION = "actuation"
ALERT = "alert"

EVENT_KINDS = (MEASUREMENT, SIGNAL, TRANSMISSION, DECISION, ACTIVATION, ACTUATION, ALERT)


@dataclass(frozen=True)
class EventRecord:
    """One log line; records order totally by (tick, seq)."""

    tick: int
    seq: int
    kind: str
    fields: dict

    def to_json(self) -> str:
        return dumps_canonical({"kind": self.kind, "seq": self.seq,
                                "tick": self.tick, **self.fields})


def render_log(records: list[EventRecord]) -> str:
    """JSON Lines, every line LF-terminated."""
    return "".join(record.to_json() + "\n" for record in records)


class StepFailure(ScenarioError):
    """A runtime step failed; partial graph and log are attached."""

    def __init__(self, cause: Exception, graph: Graph, records: list[EventRecord],
                 tick: int):
        super().__init__(f"tick {tick}: {cause}")
        self.cause = cause
        self.graph = graph
        self.records = records
        self.tick = tick


# --- deterministic randomness ---

_MASK = 2 ** 64 - 1
_GAMMA = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    z &= _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return z ^ (z >> 31)


def splitmix_at(seed: int, index: int) -> int:
    """index-th output of a SplitMix64 stream; random access is O(1)."""
    return mix64((seed + (index + 1) * _GAMMA) & _MASK)


def fnv1a64(text: str) -> int:
    h = 0xCBF29CE484222325
    for byte in text.encode("utf-8"):
        h ^= byte
        h = (h * 0x100000001B3) & _MASK
    return h


_QUANTUM = Decimal("1E-12")


def _as_decimal(x: float) -> Decimal:
    return Decimal(x).quantize(_QUANTUM, rounding=ROUND_HALF_EVEN)


def gaussian_at(seed: int, index: int) -> Decimal:
    """Standard normal draw for a sample index: Box-Muller, cosine branch."""
    u1 = ((splitmix_at(seed, 2 * index) >> 11) + 1) * 2.0 ** -53  # (0, 1]
    u2 = (splitmix_at(seed, 2 * index + 1) >> 11) * 2.0 ** -53  # [0, 1)
    return _as_decimal(math.sqrt(-2.0 * math.log(u1)) * math.cos(2.0 * math.pi * u2))


def generator_value(generator: Generator, index: int, stream_seed: int) -> Decimal:
    """Value of a generator at a sensor's sample index. Exact decimal
    arithmetic throughout; floats are quantized once on entry."""
    if isinstance(generator, ConstantGen):
        return generator.value
    if isinstance(generator, RampGen):
        return generator.start + generator.slope * index
    if isinstance(generator, SineGen):
        angle = 2.0 * math.pi * (index % generator.period) / generator.period
        return generator.mean + generator.amplitude * _as_decimal(math.sin(angle))
    if isinstance(generator, ListGen):
        return generator.values[min(index, len(generator.values) - 1)]
    if isinstance(generator, NoisyGen):
        node_seed = mix64(stream_seed ^ generator.seed)
        inner = generator_value(generator.inner, index,
                                mix64(node_seed ^ 0xA5A5A5A5A5A5A5A5))
        return inner + generator.stddev * gaussian_at(node_seed, index)
    raise TypeError(f"unknown generator {type(generator).__name__}")


# --- scheduling ---

def schedule_due(config: ScenarioConfig, tick: int) -> list[SensorSpec]:
    """Sensors due at a tick: (tick - phase) mod period = 0 and tick >= phase,
    sorted by expanded IRI."""
    due = [s for s in config.sensors
           if tick >= s.phase and (tick - s.phase) % s.period == 0]
    return sorted(due, key=lambda s: config.resolve(s.iri))


# --- the run ---

@dataclass
class _SensorState:
    spec: SensorSpec
    iri: Iri
    stream_seed: int
    next_index: int = 0


class ScenarioRun:
    """Exclusive owner of one scenario execution: graph, log, counters."""

    def __init__(self, config: ScenarioConfig, registry: Registry | None = None):
        self.config = config
        self.registry = registry if registry is not None else load_seed()
        prefixes = dict(config.prefixes)
        prefixes[ns.RUN_PREFIX] = ns.RUN_IRI
        self.graph = Graph(self.registry, prefixes=prefixes)
        self.records: list[EventRecord] = []
        self._seq = 0
        self._start = parse_datetime_utc(config.start)
        self._histories: dict[str, list[SignalPayload]] = {}
        self._event_nodes: dict[str, Iri] = {}
        self._type_nodes: dict[str, Iri] = {}
        self._activator_actions: dict[str, str] = {}
        self._alert_channels: dict[tuple[str, str], str] = {}
        self._build_static()
        self.static_statements = len(self.graph.statements)
        self._sensors = {
            spec.iri: _SensorState(
                spec, self.graph.resolve(spec.iri),
                mix64(config.seed ^ fnv1a64(config.resolve(spec.iri))))
            for spec in config.sensors}
        self.decider_iri = self.graph.resolve(config.decider.iri)

    def _build_static(self) -> None:
        g = self.graph
        config = self.config
        for place in config.places:
            g.add_entity(place, "E53")
        for asset in config.assets:
            g.add_entity(asset.iri, "HC3")
        for asset in config.assets:
            if asset.located_in is not None:
                g.add_statement(asset.iri, "P55", asset.located_in)
        if config.twin is not None:
            g.add_entity(config.twin.iri, "HC2")
            g.add_statement(config.twin.iri, "HP1", config.twin.twin_of)
        for software in config.software:
            g.add_entity(software, "D14")
        for actor in config.actors:
            g.add_entity(actor, "E39")
        for activator in config.activators:
            iri = g.add_entity(activator.iri, "HC11")
            self._activator_actions[iri.value] = activator.action
        g.add_entity(config.decider.iri, "HC10")
        for sensor in config.sensors:
            g.add_entity(sensor.iri, "HC9")
            if sensor.positioned_on is not None:
                g.add_statement(sensor.iri, "HP15", sensor.positioned_on)
            else:
                g.add_statement(sensor.iri, "P55", sensor.located_in)
            g.add_statement(sensor.iri, "HP11", sensor.software)

    # --- clock and naming ---

    def timestamp(self, tick: int) -> str:
        from datetime import timedelta
        return format_datetime_utc(
            self._start + timedelta(seconds=tick * self.config.tick_seconds))

    def _fresh(self, kind: str, sensor_local: str, index: int) -> Iri:
        return Iri(f"{ns.RUN_IRI}{kind}/{sensor_local}/{index}")

    def _record(self, tick: int, kind: str, fields: dict) -> EventRecord:
        record = EventRecord(tick, self._seq, kind, fields)
        self._seq += 1
        self.records.append(record)
        return record

    # --- pipeline steps ---

    def sample(self, spec: SensorSpec, tick: int):
        """Run one sampling act: HC13 node plus L12, O24, L17 statements."""
        state = self._sensors.get(spec.iri)
        if state is None or state.iri.value not in self.graph.nodes:
            raise SensorNotInGraphError(f"sensor {spec.iri} is not in the graph")
        index = state.next_index
        state.next_index += 1
        value = generator_value(spec.generator, index, state.stream_seed)
        local = ns.local_name(state.iri.value)
        measurement = self._fresh("m", local, index)
        g = self.graph
        g.add_entity(measurement, "HC13")
        g.add_statement(measurement, "L12", state.iri)

        event_node = self._event_nodes.get(spec.measured_type)
        if event_node is None:
            event_node = Iri(ns.RUN_IRI + "event/" + ns.slug(spec.observed_event))
            g.add_entity(event_node, "E5")
            self._event_nodes[spec.measured_type] = event_node
        g.add_statement(measurement, "O24", event_node)

        type_node = self._type_nodes.get(spec.measured_type)
        if type_node is None:
            type_node = Iri(ns.RUN_IRI + "type/" + ns.slug(spec.measured_type))
            g.add_entity(type_node, "E55")
            self._type_nodes[spec.measured_type] = type_node
        g.add_statement(measurement, "L17", type_node)

        self._record(tick, MEASUREMENT, {
            "measurement": measurement.value,
            "measuredType": spec.measured_type,
            "sensor": state.iri.value,
            "timestamp": self.timestamp(tick),
            "unit": spec.unit,
            "value": value,
        })
        return measurement, index, value

    def make_signal(self, measurement: Iri, spec: SensorSpec, index: int,
                    value: Decimal, tick: int):
        """Wrap a measurement's value in a fresh HC12 signal (L20 link)."""
        types = self.graph.nodes.get(measurement.value)
        if not types or not any(self.registry.is_subclass_of(t, "HC13") for t in types):
            raise NotAMeasurementError(f"{measurement} is not a measurement node")
        state = self._sensors[spec.iri]
        signal = self._fresh("sig", ns.local_name(state.iri.value), index)
        self.graph.add_entity(signal, "HC12")
        self.graph.add_statement(measurement, "L20", signal)
        payload = SignalPayload(
            signal_id=signal.value,
            sensor_id=state.iri.value,
            timestamp=self.timestamp(tick),
            value=value,
            unit=spec.unit,
            measured_type=spec.measured_type,
        )
        self._record(tick, SIGNAL, {
            "measurement": measurement.value,
            "payload": payload.canonical(),
            "signal": signal.value,
        })
        return signal, payload

    def transmit(self, signal: Iri, tick: int) -> None:
        """Deliver a signal to the decider (HP12; duplicates collapse)."""
        self.graph.add_statement(signal, "HP12", self.decider_iri)
        self._record(tick, TRANSMISSION, {
            "decider": self.decider_iri.value,
            "signal": signal.value,
        })

    def decide(self, payload: SignalPayload, tick: int) -> Iri | None:
        """Evaluate rules against the signal; at most one activation event.

        All action targets are checked before anything is written, so a
        missing target aborts the step with the graph untouched.
        """
        history = self._histories.setdefault(payload.measured_type, [])
        history.append(payload.value)
        fired_rules: list[str] = []
        fired_actions = []
        for rule in self.config.decider.rules:
            if rule.measured_type != payload.measured_type:
                continue
            decision = evaluate_rule(rule, history)
            if decision.fired:
                fired_rules.append(rule.id)
                fired_actions.extend(decision.actions)

        self._record(tick, DECISION, {
            "decider": self.decider_iri.value,
            "fired": bool(fired_rules),
            "firedRules": fired_rules,
            "measuredType": payload.measured_type,
            "signal": payload.signal_id,
            "value": payload.value,
        })
        if not fired_rules:
            return None

        resolved_actions = []
        for action in fired_actions:
            try:
                target = self.graph.resolve(action.target)
            except UnknownPrefixError as exc:
                raise ActionTargetMissingError(str(exc)) from exc
            types = self.graph.nodes.get(target.value)
            wanted = "HC11" if action.kind is ActionKind.ACTIVATE else "E39"
            if not types or not any(self.registry.is_subclass_of(t, wanted)
                                    for t in types):
                raise ActionTargetMissingError(
                    f"action target {action.target} is missing or not typed {wanted}")
            resolved_actions.append((action, target))

        local = ns.local_name(payload.sensor_id)
        index = payload.signal_id.rsplit("/", 1)[1]
        activation = Iri(f"{ns.RUN_IRI}act/{local}/{index}")
        self.graph.add_entity(activation, "HC14")
        self.graph.add_statement(self.decider_iri, "O13", activation)
        for action, target in resolved_actions:
            if action.kind is ActionKind.ACTIVATE:
                self.graph.add_statement(activation, "HP13", target)
            else:
                self.graph.add_statement(activation, "HP14", target)
                self._alert_channels.setdefault(
                    (activation.value, target.value), action.channel or "")
        self._record(tick, ACTIVATION, {
            "activation": activation.value,
            "decider": self.decider_iri.value,
            "firedRules": fired_rules,
            "signal": payload.signal_id,
        })
        return activation

    def execute_activation(self, activation: Iri, tick: int) -> None:
        """Emit actuation records, then alert records; no side effects."""
        types = self.graph.nodes.get(activation.value)
        if not types or not any(self.registry.is_subclass_of(t, "HC14")
                                for t in types):
            raise NotAnActivationEventError(f"{activation} is not an activation event")
        for target in self.graph.objects_of(activation, "HP13"):
            self._record(tick, ACTUATION, {
                "action": self._activator_actions.get(target.value, ""),
                "activation": activation.value,
                "activator": target.value,
            })
        for target in self.graph.objects_of(activation, "HP14"):
            self._record(tick, ALERT, {
                "activation": activation.value,
                "actor": target.value,
                "channel": self._alert_channels.get(
                    (activation.value, target.value), ""),
            })

    # --- whole runs ---

    def run(self, until: int | None = None) -> None:
        ticks = self.config.duration if until is None else min(self.config.duration, until)
        self.ticks_run = ticks
        for tick in range(ticks):
            for spec in schedule_due(self.config, tick):
                try:
                    measurement, index, value = self.sample(spec, tick)
                    signal, payload = self.make_signal(measurement, spec, index,
                                                       value, tick)
                    self.transmit(signal, tick)
                    activation = self.decide(payload, tick)
                    if activation is not None:
                        self.execute_activation(activation, tick)
                except TwingraphError as exc:
                    raise StepFailure(exc, self.graph, self.records, tick) from exc

    def summary(self) -> dict[str, int]:
        counts = {kind: 0 for kind in EVENT_KINDS}
        for record in self.records:
            counts[record.kind] += 1
        return {
            "ticks": getattr(self, "ticks_run", 0),
            "measurements": counts[MEASUREMENT],
            "signals": counts[SIGNAL],
            "activations": counts[ACTIVATION],
            "alerts": counts[ALERT],
        }


def run_scenario(config: ScenarioConfig, until: int | None = None,
                 registry: Registry | None = None) -> ScenarioRun:
    """Build the static graph and run the clock; deterministic end to end."""
    run = ScenarioRun(config, registry)
    run.run(until)
    return run
