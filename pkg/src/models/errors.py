"""
ℤ_sp 解析で使う例外クラス
"""


class ZspError(Exception):
    """
    このパッケージが送出する例外の基底クラス
    """


class InvalidModulusError(ZspError, ValueError):
    """素数でない入力、s = p、N の上限超過、範囲外の剰余"""


class BudgetExceededError(ZspError):
    """
    全列挙の要素数が予算を超えた場合の例外
    """

    def __init__(self, required: int, budget: int):
        self.required = required
        self.budget = budget
        super().__init__(f"要素数 {required} が予算 {budget} を超えています。--budget で上限を変更できます。")


class NotCyclicError(ZspError, ValueError):
    """根または弧の始点が巡回元ではない"""


class DomainNotClosedError(ZspError, ValueError):
    """定義域が平方写像で閉じていない"""


class PreconditionError(ZspError, ValueError):
    """定理の仮定を満たさない入力"""


def ensure_budget(required: int, budget: int) -> None:
    """
    要素数が予算内であることを確認する

    Args:
        required: 必要な要素数
        budget: 許容される要素数

    Raises:
        BudgetExceededError: 予算を超える場合
    """
    if required > budget:
        raise BudgetExceededError(required, budget)
