import csv
import io
import json

from isacscheduler.exporters import grid_csv
from isacscheduler.exporters.exporter_base import AbstractExporter, formatHeaderLines
from isacscheduler.misc import utils
from isacscheduler.misc.options import Option, InvalidOptionError

GRID_LAYOUT = "filas alphaS = 0..aMax ascendente, columnas alphaB = 0..aMax ascendente"
POLICY_ENCODING = "0 = sense, 1 = comm"


class CsvExporter(AbstractExporter):
    FORMAT = "csv"

    def exportValues(self, values, name):
        path = self._getPath(name, "csv")
        grid_csv.writeValueGrid(path, values, self._comments("layout: " + GRID_LAYOUT))
        return path

    def exportPolicy(self, policy, name):
        path = self._getPath(name, "csv")
        grid_csv.writePolicyGrid(path, policy, self._comments("layout: " + GRID_LAYOUT, "encoding: " + POLICY_ENCODING))
        return path

    def exportThresholds(self, thresholds, name):
        notes = ("singleCrossingOk: {0}".format(json.dumps(thresholds.singleCrossingOk)),
                 "violations: {0}".format(json.dumps(thresholds.violations)),
                 "tau = -1: se comunica en toda la fila")
        rows = [(alphaB, tau) for alphaB, tau in enumerate(thresholds.toList())]
        return self._writeTable(("alphaB", "tau"), rows, name, notes)

    def exportTable(self, columns, rows, name):
        return self._writeTable(columns, rows, name)

    def _writeTable(self, columns, rows, name, notes=()):
        buffer = io.StringIO()
        for comment in self._comments(*notes):
            buffer.write("{0} {1}\n".format(grid_csv.COMMENT_PREFIX, comment))

        writer = csv.writer(buffer, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([formatCell(cell) for cell in row])

        path = self._getPath(name, "csv")
        with open(path, "w", encoding="utf-8", newline="") as file:
            file.write(buffer.getvalue())
        return path

    def _comments(self, *notes):
        return formatHeaderLines(self._header) + list(notes)


class JsonExporter(AbstractExporter):
    FORMAT = "json"

    def exportValues(self, values, name):
        return self._writeDocument(dict(layout=GRID_LAYOUT, values=values.values.tolist()), name)

    def exportPolicy(self, policy, name):
        return self._writeDocument(dict(layout=GRID_LAYOUT, encoding=POLICY_ENCODING, policy=policy.actions.tolist()), name)

    def exportThresholds(self, thresholds, name):
        return self._writeDocument(dict(tau=thresholds.toList(),
                                        singleCrossingOk=thresholds.singleCrossingOk,
                                        violations=thresholds.violations), name)

    def exportDocument(self, document, name):
        return self._writeDocument(document, name)

    def _writeDocument(self, document, name):
        content = dict(header=self._header)
        content.update(document)

        path = self._getPath(name, "json")
        with open(path, "w", encoding="utf-8", newline="") as file:
            file.write(json.dumps(content, indent=2, ensure_ascii=False))
            file.write("\n")
        return path


class AsciiExporter(AbstractExporter):
    """
    Mapa de decisiones en texto plano, un glifo por estado, con el mismo orden de filas y columnas que los
    CSV. Los índices de las columnas se escriben en vertical, un dígito por línea.
    """

    FORMAT = "ascii"

    OPTIONS = [Option(name="senseGlyph",
                      value="S",
                      description="Glifo de los estados en los que se sensa."),
               Option(name="commGlyph",
                      value="C",
                      description="Glifo de los estados en los que se comunica.")]

    def __init__(self, outputDir, header, **options):
        super().__init__(outputDir, header, **options)

        for option in ("senseGlyph", "commGlyph"):
            if len(getattr(self, option)) != 1:
                raise InvalidOptionError(option, "se esperaba un único carácter")
        if self.senseGlyph == self.commGlyph:
            raise InvalidOptionError("commGlyph", "debe ser distinto de senseGlyph")

    def exportPolicy(self, policy, name):
        size = policy.aMax + 1
        width = len(str(policy.aMax))
        glyphs = (self.senseGlyph, self.commGlyph)

        lines = ["# " + line for line in formatHeaderLines(self._header)]
        lines.append("# layout: {0}; {1} = sense, {2} = comm".format(GRID_LAYOUT, self.senseGlyph, self.commGlyph))

        for digit in range(width):
            lines.append(" " * width + " | " + "".join(str(alphaB).rjust(width)[digit] for alphaB in range(size)))
        lines.append("-" * width + "-+-" + "-" * size)

        for alphaS in range(size):
            lines.append(str(alphaS).rjust(width) + " | " + "".join(glyphs[action] for action in policy.actions[alphaS]))

        path = self._getPath(name, "txt")
        with open(path, "w", encoding="utf-8", newline="") as file:
            file.write("\n".join(lines))
            file.write("\n")
        return path


def formatCell(cell):
    if isinstance(cell, bool):
        return "true" if cell else "false"
    if isinstance(cell, float):
        return utils.formatReal(cell)
    if isinstance(cell, (list, tuple)):
        return " ".join(formatCell(c) for c in cell)
    if cell is None:
        return ""
    return str(cell)
