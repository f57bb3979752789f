"""
Демонстрационный скрипт для nfer
Показывает вычисление правил, решение QBF и симуляцию машины Минского
"""
from datetime import datetime

from src.models.base import ValueMap
from src.models.evaluation import EvalConfig
from src.models.expression import ArithMode
from src.models.interval import Event
from src.services.engine import engine
from src.services.reductions import reductions
from src.services.spec_analyzer import spec_analyzer
from src.services.spec_parser import spec_parser
from src.services.trace_io import trace_io

MONITOR = """
# a request answered later becomes a transaction
txn <- request before response where a.id = b.id map { id := a.id, took := b.t - a.t }
# a transaction with no alarm inside it is clean
clean <- txn unless contain alarm
"""


def test_squares():
    """Повторное возведение в квадрат: d = 2^(2^n)"""
    print("🔢 ПОВТОРНОЕ ВОЗВЕДЕНИЕ В КВАДРАТ")
    print("=" * 50)

    spec, trace = reductions.compile_squares(5)
    result = engine.evaluate_trace(spec, trace)
    for interval in result.intervals():
        print(f"   {interval.name}: d = {interval.map.get('d')}")
    print(f"📊 Итераций: {result.iterations}, интервалов: {len(result.pool)}")
    print()


def test_monitor():
    """Небольшая спецификация мониторинга с исключающим правилом"""
    print("📡 МОНИТОРИНГ ТРАССЫ")
    print("=" * 50)

    spec = spec_parser.parse_spec(MONITOR)
    print(spec_parser.format_spec(spec), end='')
    trace = [
        Event('request', 1, ValueMap.of(id=7, t=1)),
        Event('response', 4, ValueMap.of(id=7, t=4)),
        Event('request', 5, ValueMap.of(id=8, t=5)),
        Event('alarm', 6),
        Event('response', 9, ValueMap.of(id=8, t=9)),
    ]
    info = spec_analyzer.classify(spec)
    print(f"⚖️  Без циклов: {info.cycle_free}, исключающие правила: {info.has_exclusive}")
    for fragment, complexity in spec_analyzer.complexity_report(info).items():
        print(f"   {fragment}: {complexity}")

    verdict = engine.decide(spec, trace, 'clean', EvalConfig(minimal=True))
    print(f"✅ Вердикт для clean: {verdict.kind.value}")
    if verdict.witness is not None:
        print(trace_io.render_witness(verdict.witness))
    print()


def test_tqbf():
    """Формула с кванторами, закодированная правилами"""
    print("🧮 QBF")
    print("=" * 50)

    formula = reductions.parse_qbf("A 2 E 3\n2 3 3\n-2 -3 -3\n")
    spec, trace, target, bound = reductions.compile_tqbf(formula)
    verdict = engine.decide(spec, trace, target, EvalConfig(mode=ArithMode.modulo(bound)))
    print(f"📊 Правил: {len(spec)}, модуль: {bound}")
    print(f"✅ Вердикт: {verdict.kind.value}")
    print()


def test_minsky():
    """Машина Минского: остановка и зацикливание"""
    print("🤖 МАШИНА МИНСКОГО")
    print("=" * 50)

    for name, program in [('останавливается', "inc 0\ninc 0\ndec 0\nstop\n"),
                          ('зацикливается', "inc 0\nifzero 1 goto 0\nstop\n")]:
        spec, trace, target = reductions.compile_minsky(reductions.parse_minsky(program))
        verdict = engine.decide(spec, trace, target, EvalConfig(fuel=50))
        print(f"   {name}: {verdict.kind.value} (итераций: {verdict.result.iterations})")
    print()


def main():
    """Запускает полную демонстрацию"""
    print("🚀 ДЕМОНСТРАЦИЯ NFER")
    print("=" * 60)
    print(f"⏰ Время запуска: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}")
    print()

    try:
        test_squares()
        test_monitor()
        test_tqbf()
        test_minsky()

        print("✅ ДЕМОНСТРАЦИЯ ЗАВЕРШЕНА")

    except Exception as e:
        print(f"❌ Ошибка во время демонстрации: {e}")


if __name__ == "__main__":
    main()
