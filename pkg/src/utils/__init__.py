"""
ユーティリティモジュール
""" 