# utils/event_logger.py
import os
import sys
from datetime import datetime
from functools import lru_cache

import gspread
import pandas as pd
from oauth2client.service_account import ServiceAccountCredentials

import config


@lru_cache(maxsize=1) # Cliente gspread criado uma única vez por processo, evitando re-autenticações repetidas.
def get_gspread_client():
    """
    Inicializa e retorna o cliente gspread autenticado, ou None se o espelho
    no Google Sheets não puder ser usado. O pipeline nunca depende deste cliente.
    """
    try:
        creds = ServiceAccountCredentials.from_json_keyfile_name(config.GSHEET_CREDENTIALS_FILE, config.GSHEET_SCOPES)
        return gspread.authorize(creds)
    except FileNotFoundError:
        print(f"Arquivo de credenciais '{config.GSHEET_CREDENTIALS_FILE}' não encontrado. Espelho no Google Sheets desabilitado.", file=sys.stderr)
        return None
    except Exception as e:
        print(f"Falha ao conectar com Google Sheets API: {e}. Espelho no Google Sheets desabilitado.", file=sys.stderr)
        return None


def log_event_to_gsheet(event_data: dict):
    """
    Registra um evento em uma nova linha da planilha configurada.
    Falhas são reportadas no stderr e o evento continua registrado localmente.
    """
    client = get_gspread_client()
    if not client:
        return

    try:
        spreadsheet = client.open(config.GSHEET_LOG_SPREADSHEET_NAME)
        try:
            worksheet = spreadsheet.worksheet(config.GSHEET_LOG_WORKSHEET_NAME)
        except gspread.exceptions.WorksheetNotFound:
            worksheet = spreadsheet.add_worksheet(title=config.GSHEET_LOG_WORKSHEET_NAME, rows="1",
                                                  cols=str(len(config.EVENT_LOG_COLUMNS)))
            worksheet.append_row(config.EVENT_LOG_COLUMNS, value_input_option='USER_ENTERED') # Adiciona cabeçalho

        log_row = [str(event_data.get(col, "")) for col in config.EVENT_LOG_COLUMNS]
        worksheet.append_row(log_row, value_input_option='USER_ENTERED')
    except gspread.exceptions.SpreadsheetNotFound:
        print(f"Planilha '{config.GSHEET_LOG_SPREADSHEET_NAME}' não encontrada. Crie-a e compartilhe com a Service Account.", file=sys.stderr)
    except Exception as e:
        print(f"Erro ao registrar log no Google Sheets: {type(e).__name__} - {e} | Dados: {event_data}", file=sys.stderr)


def log_event_to_csv(event_data: dict, path: str = None):
    """Acrescenta o evento ao CSV local, criando o arquivo (com cabeçalho) se necessário."""
    path = path or config.EVENT_LOG_CSV
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    row = pd.DataFrame([[event_data.get(col, "") for col in config.EVENT_LOG_COLUMNS]],
                       columns=config.EVENT_LOG_COLUMNS)
    write_header = not os.path.exists(path)
    try:
        row.to_csv(path, mode="a", header=write_header, index=False)
    except OSError as e:
        print(f"Não foi possível gravar o log local '{path}': {e}", file=sys.stderr)


def read_event_log(path: str = None) -> pd.DataFrame:
    """Carrega o log local; DataFrame vazio com as colunas esperadas se ainda não existir."""
    path = path or config.EVENT_LOG_CSV
    if not os.path.exists(path):
        return pd.DataFrame(columns=config.EVENT_LOG_COLUMNS)
    return pd.read_csv(path, dtype=str, keep_default_na=False)


def record_log(run_id: str, session_id: str, stage: str, action: str, details: str = ""):
    """
    Função helper para preparar e enviar dados de log.
    Simplifica a chamada nos comandos da CLI e nos módulos de utils.
    """
    if not config.EVENT_LOG_ENABLED:
        return
    event_data = {
        "Timestamp": datetime.now().strftime("%Y-%m-%d %H:%M:%S"),
        "RunID": run_id if run_id else "N/A",
        "SessionID": session_id if session_id else "N/A",
        "Etapa": stage,
        "Acao": action,
        "Detalhes": details,
    }
    log_event_to_csv(event_data)
    if config.GSHEET_LOGGING_ENABLED:
        log_event_to_gsheet(event_data)


def warn_event(stage: str, message: str, run_id: str = None, session_id: str = None):
    """Registra um aviso e o exibe no stderr."""
    print(f"⚠️ {message}", file=sys.stderr)
    record_log(run_id, session_id, stage, "Aviso", message)
