# utils/__init__.py
# Núcleo do QSVM: simulador, feature maps, kernels, backend simulado, SVM e pipeline de dados
