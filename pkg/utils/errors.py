# utils/errors.py
"""Hierarquia de exceções do toolkit. A CLI converte cada classe em um código de saída estável."""


class QsvmError(Exception):
    """Base de todos os erros do toolkit."""


class ConfigurationError(QsvmError, ValueError):
    """Dimensões ou índices incompatíveis dentro do motor de simulação."""


class ArgumentError(QsvmError, ValueError):
    """Argumento fornecido pelo chamador viola uma pré-condição."""


class UnsupportedCombinationError(ArgumentError):
    """Combinação de parâmetros sem definição (ex.: SineZZphi com |S| > 2)."""


class ResourceLimitError(QsvmError):
    """Operação recusada por exceder limites de memória/tamanho."""


class SpecHashMismatchError(ArgumentError):
    """Matriz de kernel e modelo foram produzidos por feature maps diferentes."""


class UnsupportedISAError(QsvmError):
    """O conjunto de portas do backend não consegue expressar o circuito."""


class ISAViolationError(QsvmError):
    """Circuito submetido contém portas fora do ISA do backend."""


class MaxJobSizeError(QsvmError):
    """Job com mais circuitos do que o backend aceita."""


class SessionLockedError(QsvmError):
    """Outra invocação já está usando o diretório da sessão."""


class IncompleteSessionError(QsvmError):
    """Coleta solicitada com jobs ainda pendentes ou falhos."""

    def __init__(self, pending_ids, message=None):
        self.pending_ids = list(pending_ids)
        if message is None:
            message = f"{len(self.pending_ids)} job(s) não concluído(s): {', '.join(self.pending_ids)}"
        super().__init__(message)
