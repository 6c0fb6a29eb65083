# commands/experiment.py
import os

import config
from commands import new_run_id, success, warning
from utils.event_logger import record_log
from utils.experiment import load_grid, run_experiment

STAGE = "Experimento"


def register(subparsers):
    parser = subparsers.add_parser("experiment", help="Executa uma grade de experimentos (tabelas de acurácia e F1)")
    parser.add_argument("--grid", required=True, help="Arquivo JSON da grade")
    parser.add_argument("--out-dir", required=True)
    parser.set_defaults(handler=run)


def run(args) -> int:
    run_id = new_run_id()
    grid = load_grid(args.grid)
    record_log(run_id, None, STAGE, "Comando Iniciado", f"grade={args.grid} células={grid.cell_count()}")
    tables = run_experiment(grid, args.out_dir, run_id)
    cells = tables["cells"]
    failed = int((cells["status"] == "erro").sum()) if not cells.empty else 0
    if failed:
        warning(f"{failed} execução(ões) falharam; detalhes em {os.path.join(args.out_dir, 'cells.csv')}")
    hardware = tables.get("hardware")
    if hardware is not None and (hardware["status"] == "erro").any():
        warning(f"{int((hardware['status'] == 'erro').sum())} execução(ões) no backend falharam; "
                f"detalhes em {os.path.join(args.out_dir, 'hardware.csv')}")
    success(f"{len(cells)} execução(ões) concluída(s); tabelas em {args.out_dir}")
    return config.EXIT_OK
