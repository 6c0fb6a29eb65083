# config.py
import math
import os

# Nomes de Arquivos e Diretórios (usar constantes evita erros de digitação e facilita refatoração)
SESSION_MANIFEST_FILE = "session.json"   # Manifesto da sessão dentro do diretório da sessão
SESSION_JOBS_DIR = "jobs"                # Um arquivo JSON por job
SESSION_LOCK_FILE = ".lock"              # Detecta invocações concorrentes na mesma sessão
KERNEL_SIDECAR_SUFFIX = ".json"          # Sidecar de proveniência ao lado do CSV da matriz
DATASET_SIDECAR_SUFFIX = ".json"

# Registro de eventos (para utils/event_logger.py)
EVENT_LOG_CSV = os.environ.get("QSVM_EVENT_LOG", "logs/eventos.csv")
EVENT_LOG_ENABLED = os.environ.get("QSVM_EVENT_LOG_ENABLED", "1") != "0"
EVENT_LOG_COLUMNS = ["Timestamp", "RunID", "SessionID", "Etapa", "Acao", "Detalhes"] # Garante ordem e consistência dos logs

# Configurações do Google Sheets (espelho opcional do log local)
GSHEET_LOGGING_ENABLED = os.environ.get("QSVM_GSHEET_LOGGING", "0") == "1"
GSHEET_CREDENTIALS_FILE = os.environ.get("QSVM_GSHEET_CREDENTIALS", "credentials.json")
GSHEET_LOG_SPREADSHEET_NAME = "Logs_QSVM_Malware"
GSHEET_LOG_WORKSHEET_NAME = "Eventos"
GSHEET_SCOPES = ["https://spreadsheets.google.com/feeds", "https://www.googleapis.com/auth/drive"]

# Simulador de statevector
MAX_UNITARY_QUBITS = 10        # circuit_unitary recusa acima disso (matriz 2^n x 2^n)
NORM_TOLERANCE = 1e-10
PROBABILITY_DECIMALS = 12      # Arredondamento antes da amostragem binomial

# Feature maps e kernel quântico
FEATURE_MAP_OPTIONS = ["z", "zz", "pauli", "zzphi"]
FEATURE_MAP_PAULIS = {
    "z": ["Z"],
    "zz": ["Z", "ZZ"],
    "pauli": ["X", "Y", "ZZ"],
    "zzphi": ["Z", "ZZ"],
}
ENTANGLEMENT_OPTIONS = ["full", "linear"]
ENTANGLEMENT_DEFAULT = "full"
REPS_DEFAULT = 2               # Profundidade usada em todos os experimentos
ANGLE_SCALE_DEFAULT = 1.0      # 2.0 reproduz a convenção das bibliotecas de circuitos
SHOTS_DEFAULT = 1000
SEED_DEFAULT = 42
KERNEL_METHOD_OPTIONS = ["exact", "sampled"]

# SVM
SVM_C_DEFAULT = 1.0
SVM_TOL_DEFAULT = 1e-3
SVM_MAX_PASSES_DEFAULT = 200
SVM_ALPHA_TOL = 1e-8           # Abaixo disso o multiplicador é considerado nulo
CLASSICAL_KERNEL_OPTIONS = ["linear", "polynomial", "rbf", "sigmoid"]
POLYNOMIAL_DEGREE_DEFAULT = 3
KERNEL_COEF0_DEFAULT = 0.0

# Pré-processamento
IMAGE_SIZE_DEFAULT = (64, 64)
ANGLE_RANGE_DEFAULT = (0.0, 2 * math.pi)
TEST_FRACTION_DEFAULT = 0.2
KB = 1024
# Esquema de largura por tamanho do binário (limite superior em bytes, largura em pixels)
WIDTH_SCHEDULE_DEFAULT = [
    (10 * KB, 32),
    (30 * KB, 64),
    (60 * KB, 128),
    (100 * KB, 256),
    (200 * KB, 384),
    (500 * KB, 512),
    (1000 * KB, 768),
]
WIDTH_SCHEDULE_FALLBACK = 1024
DATASET_LABEL_COLUMN = "label"
DATASET_SPLIT_COLUMN = "split"
LABELS_CSV_COLUMNS = ["filename", "label"]   # label 1 = malware, 0 = benigno

# Backend simulado
DEFAULT_ISA = ["rz", "sx", "x", "cx"]
MAX_CIRCUITS_PER_JOB_DEFAULT = 300
LICENSE_BUDGET_SECONDS = 400 * 60            # Licença mensal de 400 minutos quânticos (apenas aviso)
# Perfis embutidos, tempo médio por job medido em segundos quânticos
BACKEND_PROFILES = {
    "torino": {"seconds_per_job": 15.0},
    "algiers": {"seconds_per_job": 18.0},
    "cairo": {"seconds_per_job": 16.0},
    "kyoto": {"seconds_per_job": 17.0},
}
BACKEND_DEFAULT = "torino"
QUEUE_MODEL_OPTIONS = ["immediate", "fixed_delay", "load_factor"]
KERNEL_MODE_OPTIONS = ["submit", "run", "collect", "all", "status"]

# Experimentos
EXPERIMENT_DATA_DIMS_DEFAULT = 16
EXPERIMENT_SEPARATION_DEFAULT = 4.0
EXPERIMENT_REPEATS_DEFAULT = 1
# Faixa de ângulos da grade: mantém (π - x_i)(π - x_j) do ZZ dentro de [0, π²/4]
EXPERIMENT_ANGLE_RANGE_DEFAULT = (math.pi / 2, math.pi)

# Códigos de saída da CLI (scripts dependem de códigos estáveis)
EXIT_OK = 0
EXIT_ARGUMENT_ERROR = 2
EXIT_PENDING_SESSION = 3
EXIT_BACKEND_REJECTED = 4
