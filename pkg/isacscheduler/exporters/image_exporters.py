import io
import json

import numpy as np
from lxml import etree
from PIL import Image

from isacscheduler.exporters.exporter_base import AbstractExporter, formatHeaderLines
from isacscheduler.exporters.text_exporters import GRID_LAYOUT
from isacscheduler.mdp import solver
from isacscheduler.mdp.model import Action
from isacscheduler.misc.options import Option


class PgmExporter(AbstractExporter):
    """
    Superficie de valores como imagen en escala de grises (portable graymap binario): el menor valor de la
    grilla es negro y el mayor blanco. Cada fila de la imagen es un alphaS, cada columna un alphaB.
    """

    FORMAT = "pgm"

    OPTIONS = [Option(name="scale",
                      value=1,
                      kind=int, minimum=1,
                      description="Lado en píxeles de cada celda."),
               Option(name="invert",
                      value=False,
                      description="Si es True, el mayor valor es negro.")]

    def exportValues(self, values, name):
        array = values.values
        low, high = float(array.min()), float(array.max())

        if high > low:
            levels = np.rint((array - low) / (high - low) * 255)
        else:
            levels = np.zeros_like(array)
        if self.invert:
            levels = 255 - levels

        image = Image.fromarray(levels.astype(np.uint8))
        if self.scale > 1:
            image = image.resize((image.width * self.scale, image.height * self.scale), resample=Image.NEAREST)

        buffer = io.BytesIO()
        image.save(buffer, "PPM")

        # Pillow no escribe comentarios: los inserto después del número mágico ("P5").
        magic, _, raster = buffer.getvalue().partition(b"\n")
        notes = formatHeaderLines(self._header) + ["layout: " + GRID_LAYOUT,
                                                   "range: {0}".format(json.dumps([low, high]))]
        comments = b"".join("# {0}\n".format(note).encode("utf-8") for note in notes)

        path = self._getPath(name, "pgm")
        with open(path, "wb") as file:
            file.write(magic + b"\n" + comments + raster)
        return path


class SvgExporter(AbstractExporter):
    """
    Mapa de decisiones vectorial: una celda por estado y la curva de umbrales tau dibujada como escalera
    entre la región de sensado (arriba) y la de comunicación (abajo).
    """

    FORMAT = "svg"

    _SVG_NS = "http://www.w3.org/2000/svg"

    OPTIONS = [Option(name="cellSize",
                      value=12,
                      kind=int, minimum=1,
                      description="Lado en píxeles de cada celda."),
               Option(name="senseColor",
                      value="#2b6cb0",
                      description="Color de los estados en los que se sensa."),
               Option(name="commColor",
                      value="#f6ad55",
                      description="Color de los estados en los que se comunica.")]

    def exportPolicy(self, policy, name):
        size = policy.aMax + 1
        cell = self.cellSize
        margin = 3 * cell
        side = margin + size * cell

        svg = etree.Element(self._tag("svg"),
                            {"version": "1.1", "width": str(side), "height": str(side), "viewBox": "0 0 {0} {0}".format(side)},
                            nsmap={None: SvgExporter._SVG_NS})

        etree.SubElement(svg, self._tag("title")).text = "Mapa de decisiones (aMax = {0})".format(policy.aMax)
        etree.SubElement(svg, self._tag("desc")).text = "{0}; sense = {1}, comm = {2}".format(GRID_LAYOUT, self.senseColor, self.commColor)
        etree.SubElement(svg, self._tag("metadata")).text = "\n".join(formatHeaderLines(self._header))

        etree.SubElement(svg, self._tag("text"), {"x": str(margin), "y": str(cell)}).text = "alphaB →"
        etree.SubElement(svg, self._tag("text"), {"x": "0", "y": str(margin - cell // 2)}).text = "alphaS ↓"

        cells = etree.SubElement(svg, self._tag("g"), {"id": "cells", "stroke": "none"})
        colors = {Action.SENSE: self.senseColor, Action.COMM: self.commColor}
        for alphaS in range(size):
            for alphaB in range(size):
                etree.SubElement(cells, self._tag("rect"), {"x": str(margin + alphaB * cell),
                                                 "y": str(margin + alphaS * cell),
                                                 "width": str(cell),
                                                 "height": str(cell),
                                                 "fill": colors[Action(int(policy.actions[alphaS, alphaB]))]})

        thresholds, _ = solver.extractThresholds(policy)
        etree.SubElement(svg, self._tag("path"), {"id": "switchingCurve",
                                       "d": self._staircase(thresholds.toList(), margin, cell),
                                       "fill": "none",
                                       "stroke": "black",
                                       "stroke-width": str(max(1, cell // 6))})

        path = self._getPath(name, "svg")
        with open(path, "wb") as file:
            file.write(etree.tostring(svg, encoding="utf-8", xml_declaration=True, pretty_print=True))
        return path

    @staticmethod
    def _tag(name):
        return "{{{0}}}{1}".format(SvgExporter._SVG_NS, name)

    @staticmethod
    def _staircase(tau, margin, cell):
        """
        Retorna el atributo "d" de un path que, para cada columna alphaB, recorre el borde inferior de la
        celda (tau, alphaB).
        """
        commands = []
        for alphaB, threshold in enumerate(tau):
            y = margin + (threshold + 1) * cell
            left, right = margin + alphaB * cell, margin + (alphaB + 1) * cell
            commands.append("{0} {1} {2} L {3} {2}".format("M" if alphaB == 0 else "L", left, y, right))
        return " ".join(commands)
