# utils/backend.py
"""
Backend quântico simulado: perfis com ISA e limite de circuitos por job, sessões com um job por
entrada do kernel, armazenamento persistente de jobs em JSON e contabilidade de tempo quântico.

A avaliação é dividida em fases (submit -> run -> collect) que podem rodar em processos
diferentes; todo o estado necessário vive no diretório da sessão.
"""
import json
import os
import tempfile
from contextlib import contextmanager
from dataclasses import dataclass, field

import simpy

import config
from utils.errors import (ArgumentError, IncompleteSessionError, ISAViolationError, MaxJobSizeError,
                          SessionLockedError)
from utils.event_logger import record_log, warn_event
from utils.feature_maps import FeatureMapSpec
from utils.quantum_kernel import (ComputeUncompute, assemble_kernel_matrices, entry_seed, fidelity_circuits,
                                  method_from_dict)
from utils.statevector import (Circuit, GateKind, apply_circuit, circuit_from_dict, circuit_to_dict,
                               probability_all_zeros, sample_zero_counts, zero_state)
from utils.transpiler import isa_violations, normalize_isa, transpile

STAGE = "Backend"

JOB_QUEUED = "Queued"
JOB_RUNNING = "Running"
JOB_DONE = "Done"
JOB_FAILED = "Failed"
_TRANSITIONS = {
    JOB_QUEUED: {JOB_RUNNING},
    JOB_RUNNING: {JOB_DONE, JOB_FAILED},
    JOB_DONE: set(),
    JOB_FAILED: set(),
}


@dataclass(frozen=True)
class QueueModel:
    """
    Espera antes de o job chegar ao processador:
      immediate   - nenhuma
      fixed_delay - `value` segundos por job
      load_factor - `value` x seconds_per_job x posição do job no lote executado
    """
    kind: str = "immediate"
    value: float = 0.0

    def __post_init__(self):
        if self.kind not in config.QUEUE_MODEL_OPTIONS:
            raise ArgumentError(f"Modelo de fila desconhecido: '{self.kind}'")
        if float(self.value) < 0:
            raise ArgumentError(f"Parâmetro do modelo de fila deve ser >= 0, recebeu {self.value}")
        object.__setattr__(self, "value", float(self.value))

    def delay(self, position: int, seconds_per_job: float) -> float:
        if self.kind == "fixed_delay":
            return self.value
        if self.kind == "load_factor":
            return self.value * seconds_per_job * position
        return 0.0


@dataclass(frozen=True)
class BackendProfile:
    name: str
    basis_gates: frozenset = frozenset(GateKind(k) for k in config.DEFAULT_ISA)
    max_circuits_per_job: int = config.MAX_CIRCUITS_PER_JOB_DEFAULT
    seconds_per_job: float = 15.0
    queue_model: QueueModel = field(default_factory=QueueModel)

    def __post_init__(self):
        object.__setattr__(self, "basis_gates", normalize_isa(self.basis_gates))
        if int(self.max_circuits_per_job) < 1:
            raise ArgumentError(f"max_circuits_per_job deve ser >= 1, recebeu {self.max_circuits_per_job}")
        if float(self.seconds_per_job) <= 0:
            raise ArgumentError(f"seconds_per_job deve ser > 0, recebeu {self.seconds_per_job}")
        object.__setattr__(self, "max_circuits_per_job", int(self.max_circuits_per_job))
        object.__setattr__(self, "seconds_per_job", float(self.seconds_per_job))

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "basis_gates": sorted(k.value for k in self.basis_gates),
            "max_circuits_per_job": self.max_circuits_per_job,
            "seconds_per_job": self.seconds_per_job,
            "queue_model": {"kind": self.queue_model.kind, "value": self.queue_model.value},
        }

    @classmethod
    def from_dict(cls, data: dict) -> "BackendProfile":
        queue = data.get("queue_model") or {}
        return cls(
            name=data["name"],
            basis_gates=data.get("basis_gates", config.DEFAULT_ISA),
            max_circuits_per_job=data.get("max_circuits_per_job", config.MAX_CIRCUITS_PER_JOB_DEFAULT),
            seconds_per_job=data["seconds_per_job"],
            queue_model=QueueModel(queue.get("kind", "immediate"), queue.get("value", 0.0)),
        )


def builtin_profiles() -> dict:
    return {name: BackendProfile(name=name, seconds_per_job=values["seconds_per_job"])
            for name, values in config.BACKEND_PROFILES.items()}


def get_profile(name_or_path: str) -> BackendProfile:
    """Perfil embutido pelo nome ou carregado de um arquivo JSON."""
    profiles = builtin_profiles()
    if name_or_path in profiles:
        return profiles[name_or_path]
    if os.path.isfile(name_or_path):
        with open(name_or_path) as f:
            return BackendProfile.from_dict(json.load(f))
    raise ArgumentError(f"Perfil de backend desconhecido: '{name_or_path}'. Embutidos: {sorted(profiles)}")


@dataclass(frozen=True)
class KernelPair:
    """Uma entrada do kernel a estimar: bloco (train/test), índices e circuito compute-uncompute."""
    block: str
    i: int
    j: int
    circuit: Circuit
    seed: int


@dataclass
class Job:
    id: str
    circuits: list
    shots: int
    entries: list                 # (bloco, i, j) de cada circuito
    seeds: list                   # semente de amostragem de cada circuito
    status: str = JOB_QUEUED
    result: list = None           # [{"zeros": int, "shots": int}] por circuito, presente sse Done
    submitted_at: float = 0.0
    completed_at: float = None
    queued_seconds: float = 0.0
    reason: str = ""

    def transition(self, status: str):
        if status not in _TRANSITIONS[self.status]:
            raise ArgumentError(f"Transição inválida do job {self.id}: {self.status} -> {status}")
        self.status = status

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "circuits": [circuit_to_dict(c) for c in self.circuits],
            "shots": self.shots,
            "entries": [list(e) for e in self.entries],
            "seeds": [str(s) for s in self.seeds],
            "status": self.status,
            "result": self.result,
            "submitted_at": self.submitted_at,
            "completed_at": self.completed_at,
            "queued_seconds": self.queued_seconds,
            "reason": self.reason,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Job":
        return cls(
            id=data["id"],
            circuits=[circuit_from_dict(c) for c in data["circuits"]],
            shots=int(data["shots"]),
            entries=[(e[0], int(e[1]), int(e[2])) for e in data["entries"]],
            seeds=[int(s) for s in data["seeds"]],
            status=data["status"],
            result=data.get("result"),
            submitted_at=data.get("submitted_at", 0.0),
            completed_at=data.get("completed_at"),
            queued_seconds=data.get("queued_seconds", 0.0),
            reason=data.get("reason", ""),
        )


@dataclass
class Session:
    id: str
    backend: str
    job_ids: list = field(default_factory=list)
    quantum_seconds: float = 0.0
    queued_seconds: float = 0.0
    clock: float = 0.0
    budget_warned: bool = False
    metadata: dict = field(default_factory=dict)   # tamanhos, feature map e método para a montagem

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "backend": self.backend,
            "job_ids": list(self.job_ids),
            "quantum_seconds": self.quantum_seconds,
            "queued_seconds": self.queued_seconds,
            "clock": self.clock,
            "budget_warned": self.budget_warned,
            "metadata": self.metadata,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Session":
        return cls(**data)


def _atomic_write_json(path: str, data: dict):
    directory = os.path.dirname(path) or "."
    fd, tmp_path = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".json")
    try:
        with os.fdopen(fd, "w") as f:
            json.dump(data, f, indent=2, sort_keys=True)
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise


class JobStore:
    """Diretório da sessão: `session.json` + `jobs/<id>.json`, cada arquivo gravado atomicamente."""

    def __init__(self, directory: str):
        self.directory = directory
        self.jobs_dir = os.path.join(directory, config.SESSION_JOBS_DIR)
        self.manifest_path = os.path.join(directory, config.SESSION_MANIFEST_FILE)
        self.lock_path = os.path.join(directory, config.SESSION_LOCK_FILE)
        os.makedirs(self.jobs_dir, exist_ok=True)

    def _job_path(self, job_id: str) -> str:
        return os.path.join(self.jobs_dir, f"{job_id}.json")

    def save_job(self, job: Job):
        _atomic_write_json(self._job_path(job.id), job.to_dict())

    def load_job(self, job_id: str) -> Job:
        try:
            with open(self._job_path(job_id)) as f:
                return Job.from_dict(json.load(f))
        except FileNotFoundError:
            raise ArgumentError(f"Job '{job_id}' não encontrado em {self.jobs_dir}")

    def job_ids(self) -> list:
        return sorted(name[:-5] for name in os.listdir(self.jobs_dir)
                      if name.endswith(".json") and not name.startswith("."))

    def save_session(self, session: Session):
        _atomic_write_json(self.manifest_path, session.to_dict())

    def load_session(self) -> Session:
        if not os.path.exists(self.manifest_path):
            return None
        with open(self.manifest_path) as f:
            return Session.from_dict(json.load(f))

    @contextmanager
    def lock(self):
        """Um único escritor por diretório de sessão."""
        try:
            fd = os.open(self.lock_path, os.O_CREAT | os.O_EXCL | os.O_WRONLY)
        except FileExistsError:
            raise SessionLockedError(
                f"Sessão '{self.directory}' em uso por outra invocação (remova '{self.lock_path}' se ela foi interrompida)")
        try:
            os.write(fd, str(os.getpid()).encode())
            os.close(fd)
            yield self
        finally:
            if os.path.exists(self.lock_path):
                os.remove(self.lock_path)


def open_session(store: JobStore, session_id: str, profile: BackendProfile, metadata: dict = None) -> Session:
    """Carrega a sessão existente do diretório ou cria uma nova para o perfil."""
    session = store.load_session()
    if session is None:
        session = Session(id=session_id, backend=profile.name, metadata=metadata or {})
        store.save_session(session)
        record_log(None, session.id, STAGE, "Sessão Criada", f"Backend: {profile.name}")
    elif session.backend != profile.name:
        raise ArgumentError(f"Sessão '{session.id}' pertence ao backend '{session.backend}', não a '{profile.name}'")
    return session


def prepare_kernel_pairs(X_train, X_test, spec: FeatureMapSpec, profile: BackendProfile, base_seed: int) -> list:
    """Circuitos compute-uncompute já transpilados para o ISA do perfil, com as sementes por entrada."""
    return [
        KernelPair(block, i, j, transpile(circuit, profile.basis_gates), entry_seed(base_seed, block, i, j))
        for block, i, j, circuit in fidelity_circuits(X_train, X_test, spec)
    ]


def submit_kernel_jobs(pairs, profile: BackendProfile, shots: int, store: JobStore, session: Session,
                       circuits_per_job: int = 1) -> list:
    """
    Enfileira os circuitos em jobs de `circuits_per_job` circuitos (1 = um job por entrada).
    Toda a submissão é validada antes de qualquer gravação: nada é enfileirado se algum job for rejeitado.
    """
    if int(shots) < 1:
        raise ArgumentError(f"shots deve ser >= 1, recebeu {shots}")
    if int(circuits_per_job) < 1:
        raise ArgumentError(f"circuits_per_job deve ser >= 1, recebeu {circuits_per_job}")
    pairs = list(pairs)
    for pair in pairs:
        violations = isa_violations(pair.circuit, profile.basis_gates)
        if violations:
            raise ISAViolationError(
                f"Circuito da entrada ({pair.block}, {pair.i}, {pair.j}) usa a porta '{violations[0].value}', "
                f"fora do ISA de {profile.name}: {sorted(k.value for k in profile.basis_gates)}")
    chunks = [pairs[k:k + circuits_per_job] for k in range(0, len(pairs), circuits_per_job)]
    for chunk in chunks:
        if len(chunk) > profile.max_circuits_per_job:
            raise MaxJobSizeError(
                f"Job com {len(chunk)} circuitos excede o limite de {profile.max_circuits_per_job} do backend {profile.name}")

    job_ids = []
    offset = len(session.job_ids)
    for index, chunk in enumerate(chunks):
        job = Job(
            id=f"{session.id}-{offset + index:06d}",
            circuits=[p.circuit for p in chunk],
            shots=int(shots),
            entries=[(p.block, p.i, p.j) for p in chunk],
            seeds=[p.seed for p in chunk],
            submitted_at=session.clock,
        )
        store.save_job(job)
        job_ids.append(job.id)
    session.job_ids.extend(job_ids)
    store.save_session(session)
    record_log(None, session.id, STAGE, "Jobs Submetidos",
               f"{len(job_ids)} job(s), {len(pairs)} circuito(s), {shots} shots, backend {profile.name}")
    return job_ids


def _simulate_job(job: Job) -> list:
    results = []
    for circuit, seed in zip(job.circuits, job.seeds):
        state = apply_circuit(zero_state(circuit.num_qubits), circuit)
        zeros = sample_zero_counts(probability_all_zeros(state), job.shots, seed)
        results.append({"zeros": zeros, "shots": job.shots})
    return results


def run_pending(store: JobStore, profile: BackendProfile, clock: simpy.Environment = None) -> int:
    """
    Executa os jobs Queued da sessão no simulador de statevector, um por vez no processador simulado.
    Cada job concluído consome `seconds_per_job` de tempo quântico. Retorna o número de jobs Done.
    """
    session = store.load_session()
    if session is None:
        return 0
    if session.backend != profile.name:
        raise ArgumentError(f"Sessão '{session.id}' pertence ao backend '{session.backend}', não a '{profile.name}'")
    pending = [store.load_job(job_id) for job_id in session.job_ids]
    pending = [job for job in pending if job.status == JOB_QUEUED]
    if not pending:
        return 0

    env = clock if clock is not None else simpy.Environment(initial_time=session.clock)
    processor = simpy.Resource(env, capacity=1)
    completed = []

    def execute(job: Job, position: int):
        arrival = env.now
        yield env.timeout(profile.queue_model.delay(position, profile.seconds_per_job))
        with processor.request() as slot:
            yield slot
            job.queued_seconds = env.now - arrival
            job.transition(JOB_RUNNING)
            store.save_job(job)
            try:
                result = _simulate_job(job)
            except Exception as e:
                job.transition(JOB_FAILED)
                job.reason = f"{type(e).__name__}: {e}"
                job.completed_at = env.now
                store.save_job(job)
                warn_event(STAGE, f"Job {job.id} falhou: {job.reason}", session_id=session.id)
                return
            yield env.timeout(profile.seconds_per_job)
            job.result = result
            job.transition(JOB_DONE)
            job.completed_at = env.now
            store.save_job(job)
            completed.append(job)

    for position, job in enumerate(pending):
        env.process(execute(job, position))
    env.run()

    session.quantum_seconds += len(completed) * profile.seconds_per_job
    session.queued_seconds += sum(job.queued_seconds for job in pending)
    session.clock = env.now
    if session.quantum_seconds > config.LICENSE_BUDGET_SECONDS and not session.budget_warned:
        session.budget_warned = True
        warn_event(STAGE, f"Tempo quântico acumulado ({session.quantum_seconds / 60:.1f} min) excede a licença de "
                          f"{config.LICENSE_BUDGET_SECONDS / 60:.0f} min", session_id=session.id)
    store.save_session(session)
    record_log(None, session.id, STAGE, "Jobs Executados",
               f"{len(completed)} concluído(s) de {len(pending)}; tempo quântico acumulado {session.quantum_seconds:.1f} s")
    return len(completed)


def collect_kernel_results(job_ids, store: JobStore) -> dict:
    """{(bloco, i, j): fração de |0^n>} de todos os circuitos dos jobs; exige todos os jobs Done."""
    jobs = [store.load_job(job_id) for job_id in job_ids]
    pending = [job.id for job in jobs if job.status != JOB_DONE]
    if pending:
        raise IncompleteSessionError(pending)
    results = {}
    for job in jobs:
        for entry, counts in zip(job.entries, job.result):
            results[tuple(entry)] = counts["zeros"] / counts["shots"]
    return results


def assemble_session_matrices(store: JobStore) -> tuple:
    """Coleta a sessão inteira e monta (treino, teste) com os metadados salvos na submissão."""
    session = store.load_session()
    if session is None:
        raise ArgumentError(f"Nenhuma sessão em '{store.directory}'")
    meta = session.metadata
    results = collect_kernel_results(session.job_ids, store)
    spec = FeatureMapSpec.from_dict(meta["feature_map"])
    method = method_from_dict(meta["method"])
    if not isinstance(method, ComputeUncompute):
        raise ArgumentError("Sessões de backend exigem o método amostrado")
    train, test = assemble_kernel_matrices(results, meta["n_train"], meta["n_test"], spec, method)
    for matrix in (train, test):
        matrix.metadata.update({"backend": session.backend, "session": session.id})
    record_log(None, session.id, STAGE, "Resultados Coletados", f"{len(results)} entrada(s)")
    return train, test


def session_report(store: JobStore) -> dict:
    """Resumo operacional: jobs por status, tempo quântico e tempo de fila."""
    session = store.load_session()
    if session is None:
        raise ArgumentError(f"Nenhuma sessão em '{store.directory}'")
    by_status = {status: 0 for status in _TRANSITIONS}
    failed = []
    for job_id in session.job_ids:
        job = store.load_job(job_id)
        by_status[job.status] += 1
        if job.status == JOB_FAILED:
            failed.append({"id": job.id, "reason": job.reason})
    return {
        "session": session.id,
        "backend": session.backend,
        "jobs": len(session.job_ids),
        "by_status": by_status,
        "failed": failed,
        "quantum_seconds": session.quantum_seconds,
        "quantum_minutes": session.quantum_seconds / 60,
        "queued_seconds": session.queued_seconds,
        "clock": session.clock,
        "license_budget_minutes": config.LICENSE_BUDGET_SECONDS / 60,
    }
