# utils/html_generator.py
import html

import pandas as pd

TABLE_TITLES = {
    "accuracy": "Acurácia por kernel",
    "f1": "F1 por kernel",
    "hardware": "Execução no backend simulado",
    "cells": "Proveniência por célula",
}

REPORT_CSS = """
body { font-family: sans-serif; margin: 2em; color: #222; }
h1 { font-size: 1.4em; }
.qsvm-table { border-collapse: collapse; margin-bottom: 2em; }
.qsvm-table th, .qsvm-table td { border: 1px solid #ccc; padding: 4px 10px; text-align: center; }
.qsvm-table th { background: #f0f0f0; }
.summary-card { display: inline-block; border: 1px solid #ddd; border-radius: 6px; padding: 0.5em 1.2em; margin: 0 1em 1em 0; }
.card-value { font-size: 1.4em; font-weight: bold; margin: 0; }
"""


def dataframe_to_html_custom(df: pd.DataFrame, table_id: str = None, table_classes: str = "qsvm-table",
                             float_format: str = "{:.4f}") -> str:
    """
    Converte um DataFrame em tabela HTML com classes CSS e ID opcional.
    Args:
        df (pd.DataFrame): O DataFrame a ser convertido.
        table_id (str, optional): ID da tag <table>.
        table_classes (str): Classes CSS da tag <table>.
        float_format (str): Formato dos valores reais.
    Returns:
        str: A tabela HTML, ou um parágrafo informativo se o DataFrame estiver vazio.
    """
    if df is None or df.empty:
        return "<p style='text-align: center; color: #777;'>Não há dados para exibir nesta seção.</p>"

    table_attributes = f'class="{table_classes}"'
    if table_id:
        table_attributes += f' id="{table_id}"'

    # na_rep marca células sem resultado (kernel que falhou ou não rodou)
    html_output = df.to_html(index=False, justify='center', na_rep='-', float_format=float_format.format)
    if "<table" in html_output:
        html_output = html_output.replace("<table", f"<table {table_attributes}", 1)
    else:
        html_output = f"<table {table_attributes}>{html_output}</table>"
    return html_output


def create_summary_card_html(title: str, value: str) -> str:
    """Card de resumo simples (CSS em REPORT_CSS)."""
    return f"""
    <div class="summary-card">
        <h4>{html.escape(title)}</h4>
        <p class="card-value">{html.escape(str(value))}</p>
    </div>
    """


def build_experiment_report(tables: dict, title: str = "Experimento QSVM") -> str:
    """Página HTML completa com cards de resumo e uma seção por tabela, na ordem de TABLE_TITLES."""
    cells = tables.get("cells")
    cards = ""
    if cells is not None:
        total = len(cells)
        failed = int((cells["status"] == "erro").sum()) if total else 0
        cards = create_summary_card_html("Execuções", total) + create_summary_card_html("Falhas", failed)
    sections = []
    for name, section_title in TABLE_TITLES.items():
        if name in tables:
            sections.append(f"<h2>{section_title}</h2>\n{dataframe_to_html_custom(tables[name], table_id=f'tabela-{name}')}")
    body = "\n".join(sections)
    return (f"<!DOCTYPE html>\n<html lang=\"pt-BR\">\n<head>\n<meta charset=\"utf-8\">\n<title>{html.escape(title)}</title>\n"
            f"<style>{REPORT_CSS}</style>\n</head>\n<body>\n<h1>{html.escape(title)}</h1>\n{cards}\n{body}\n</body>\n</html>\n")
