"""
ℤ_sp の代数構造と平方写像のモジュール
"""
