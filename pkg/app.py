# app.py
"""Ponto de entrada da CLI: `python app.py <comando> [opções]`."""
import argparse
import sys

import config
from commands import experiment, kernel, model, preprocess, warning
from utils.errors import (IncompleteSessionError, ISAViolationError, MaxJobSizeError, QsvmError,
                          UnsupportedISAError)
from utils.event_logger import record_log

# Ordem importa: a primeira classe compatível define o código de saída
EXIT_CODE_MAP = [
    (IncompleteSessionError, config.EXIT_PENDING_SESSION),
    ((MaxJobSizeError, ISAViolationError, UnsupportedISAError), config.EXIT_BACKEND_REJECTED),
    ((QsvmError, ValueError, FileNotFoundError), config.EXIT_ARGUMENT_ERROR),
]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qsvm",
        description="Classificação de malware com SVM de kernel quântico (simulador de statevector e backend simulado)")
    subparsers = parser.add_subparsers(dest="command", required=True)
    for module in (preprocess, kernel, model, experiment):
        module.register(subparsers)
    return parser


def exit_code_for(error: Exception) -> int:
    for classes, code in EXIT_CODE_MAP:
        if isinstance(error, classes):
            return code
    raise error


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except IncompleteSessionError as e:
        warning(f"Sessão incompleta: {e}")
        for job_id in e.pending_ids:
            print(job_id, file=sys.stderr)
        code = exit_code_for(e)
    except (QsvmError, ValueError, FileNotFoundError) as e:
        warning(f"{type(e).__name__}: {e}")
        code = exit_code_for(e)
    record_log(None, None, "CLI", "Erro", f"{args.command} -> código {code}")
    return code


if __name__ == "__main__":
    sys.exit(main())
