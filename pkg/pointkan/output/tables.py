'''Plain-text tables (metrics logs, sweep and accounting tables)
'''
from collections import OrderedDict

def format_cell(value):
  if isinstance(value, float):
    return '%.10g' % value
  return str(value)

def table_lines(table, delimiter=','):
  '''Returns the lines of a column table (OrderedDict name -> list).'''
  columns = list(table)
  lines = [delimiter.join(columns)]
  n_rows = max([len(table[c]) for c in columns] + [0])
  for i in range(n_rows):
    lines.append(delimiter.join(format_cell(table[c][i]) if i < len(table[c]) else ''
                                for c in columns))
  return lines

def write_table(table, filename, delimiter=','):
  '''Writes a column table as delimited text with a header line.'''
  with open(filename, 'w') as fd:
    fd.write('\n'.join(table_lines(table, delimiter)) + '\n')
  return filename

def read_table(filename, delimiter=','):
  '''Reads a table of :func:`write_table`; numeric cells become floats.'''
  with open(filename, 'r') as fd:
    lines = [l.rstrip('\n') for l in fd if l.strip()]
  columns = lines[0].split(delimiter)
  table = OrderedDict((c, []) for c in columns)
  for line in lines[1:]:
    for c, cell in zip(columns, line.split(delimiter)):
      try:
        table[c].append(float(cell))
      except ValueError:
        table[c].append(cell)
  return table

def pretty_table(table):
  '''Returns the table aligned in columns for the terminal.'''
  lines = [l.split('\t') for l in table_lines(table, delimiter='\t')]
  widths = [max(len(l[i]) for l in lines if i < len(l)) for i in range(len(lines[0]))]
  return '\n'.join('  '.join(cell.rjust(w) for cell, w in zip(l, widths)) for l in lines)

class MetricsLog(object):
  '''CSV-style metrics log with one line per epoch.'''
  def __init__(self, filename, columns):
    self.filename = filename
    self.columns = list(columns)
    if filename is not None:
      with open(filename, 'w') as fd:
        fd.write(','.join(self.columns) + '\n')
    self.rows = []

  def append(self, **values):
    row = [values.get(c, '') for c in self.columns]
    self.rows.append(row)
    if self.filename is not None:
      with open(self.filename, 'a') as fd:
        fd.write(','.join(format_cell(v) for v in row) + '\n')

  def table(self):
    return OrderedDict((c, [r[i] for r in self.rows]) for i, c in enumerate(self.columns))
