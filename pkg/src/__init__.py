"""
ℤ_sp 平方写像解析パッケージ
"""
